"""Curvature fixed point, skill and preference recovery, and the optimal serve strategy.

Win curves are power functions of the serve-in probability:

    f(x) = (a_f - x**lam) / tau_f      one-shot wins
    k(x) = (a_k - x**lam) / tau_k      multi-shot wins

and a player maximizes ``p + (beta - 1) * (multi-shot part of p)``.  The
curvature ``lam`` is pinned down by the two observed serve-in rates alone;
slopes, intercepts and ``beta`` then follow in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .estimation import DataConditionReport, DomainError, ServeStats, validate_theorem_conditions

DEFAULT_EPS = 1e-10
LOWER_START = 1e-6
UPPER_START = 4.0
UPPER_MAX = 128.0


class PreconditionFailed(ValueError):
    def __init__(self, report: DataConditionReport):
        super().__init__(report.details)
        self.report = report


class BracketError(ValueError):
    pass


class DivisionByZero(ValueError):
    def __init__(self, which: str):
        super().__init__(f"{which} is zero")
        self.which = which


class SingularDenominator(ValueError):
    pass


class NoInteriorSolution(ValueError):
    pass


class FitError(ValueError):
    """A per-player fit failure tagged with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class StaticsSign(str, enum.Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"
    INVARIANT = "Invariant"


@dataclass(frozen=True)
class SkillParams:
    lam: float
    a_f: float
    tau_f: float
    a_k: float
    tau_k: float

    @property
    def tau(self) -> float:
        return self.tau_f * self.tau_k / (self.tau_f + self.tau_k)

    @property
    def a(self) -> float:
        return (self.a_f * self.tau_k + self.a_k * self.tau_f) / (self.tau_f + self.tau_k)

    def f(self, x: float) -> float:
        return (self.a_f - _pow(x, self.lam)) / self.tau_f

    def k(self, x: float) -> float:
        return (self.a_k - _pow(x, self.lam)) / self.tau_k

    def y(self, x: float) -> float:
        return self.f(x) + self.k(x)


@dataclass(frozen=True)
class PreferenceParams:
    beta: float

    @property
    def delta(self) -> float:
        return self.beta - 1.0


@dataclass(frozen=True)
class Condition3Report:
    curvature: bool  # lam > 1
    slopes: bool  # tau_f > 0 and (tau_k > 0 or -tau_k > max(tau_f, beta*tau_f))
    intercept: bool  # 0 < a < lam + 1


@dataclass(frozen=True)
class StructuralFit:
    stats: ServeStats
    skills: SkillParams
    prefs: PreferenceParams
    soc_ok: bool
    condition3: Condition3Report
    iterations: int
    residual: float


def _pow(x: float, lam: float) -> float:
    return math.exp(lam * math.log(x))


def lambda_map(lam: float, x1: float, x2: float) -> float:
    """The self-consistency map whose fixed point is the curvature."""
    if not (0.0 < x1 < x2 < 1.0) or lam <= 0.0:
        raise DomainError(f"need 0 < x1 < x2 < 1 and lam > 0, got x1={x1}, x2={x2}, lam={lam}")
    return math.exp(lam * math.log(x2 / x1)) * (1.0 + lam * (1.0 - x2)) - 1.0


def lambda_map_derivative(lam: float, x1: float, x2: float) -> float:
    r = math.log(x2 / x1)
    return (lambda_map(lam, x1, x2) + 1.0) * r + (1.0 - x2) * math.exp(lam * r)


def bisect_lambda(x1: float, x2: float, eps: float = DEFAULT_EPS,
                  u_max: float = UPPER_MAX) -> tuple[float, int, float]:
    """Bisection for the curvature; returns (lam, iterations, |map(lam) - lam|)."""
    report = validate_theorem_conditions(x1, x2)
    if not report.all_hold:
        raise PreconditionFailed(report)
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = math.log(x2 / x1)
    s = 1.0 - x2

    def excess(lam):
        return math.exp(lam * r) * (1.0 + lam * s) - 1.0 - lam

    lo, hi = LOWER_START, UPPER_START
    while excess(hi) <= 0.0:
        hi *= 2.0
        if hi > u_max:
            raise BracketError(f"no upper bracket below {u_max} for x1={x1}, x2={x2}")
    it = 0
    while hi - lo >= eps:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket is one ulp wide; eps is below float spacing here
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    lam = 0.5 * (lo + hi)
    return lam, it, abs(excess(lam))


def solve_lambda(x1: float, x2: float, eps: float = DEFAULT_EPS) -> float:
    return bisect_lambda(x1, x2, eps)[0]


def recover_slopes_constants(lam: float, stats: ServeStats) -> SkillParams:
    """Slopes and intercepts of the one-shot and multi-shot curves through the two observed points."""
    s = stats
    z1, z2 = _pow(s.x1, lam), _pow(s.x2, lam)
    for name, lo, hi in (("dz", z1, z2), ("df", s.f1, s.f2), ("dk", s.k1, s.k2)):
        if lo == hi:
            raise DivisionByZero(name)
    tau_f = -(z1 - z2) / (s.f1 - s.f2)
    tau_k = -(z1 - z2) / (s.k1 - s.k2)
    if tau_f + tau_k == 0.0:
        raise DivisionByZero("tau_f + tau_k")
    return SkillParams(lam=lam, a_f=tau_f * s.f1 + z1, tau_f=tau_f, a_k=tau_k * s.k1 + z1, tau_k=tau_k)


def recover_beta(lam: float, stats: ServeStats) -> PreferenceParams:
    """Relative weight on multi-shot wins implied by the second-serve first-order condition."""
    s = stats
    if s.x2 <= 0 or s.f2 <= 0 or s.k2 <= 0:
        raise SingularDenominator("x2, f2 and k2 must be positive")
    z1, z2 = _pow(s.x1, lam), _pow(s.x2, lam)
    dz = (z1 - z2) / z2
    df = (s.f1 - s.f2) / s.f2
    dk = (s.k1 - s.k2) / s.k2
    den = dz + lam * dk
    if den == 0.0:
        raise SingularDenominator("dz + lam*dk is zero")
    return PreferenceParams(beta=-(s.f2 / s.k2) * (dz + lam * df) / den)


def _inverse_pow(v: float, lam: float) -> float:
    return math.exp(math.log(v) / lam)


def optimal_strategy(skills: SkillParams, beta: float) -> tuple[float, float]:
    """Interior maximizer (x1, x2) of perceived point-win probability."""
    lam = skills.lam
    ratio = beta * skills.tau_f / skills.tau_k
    if 1.0 + ratio <= 0.0:
        raise NoInteriorSolution(f"1 + beta*tau_f/tau_k = {1.0 + ratio:.6g} is not positive")
    z2 = (skills.a_f + skills.a_k * ratio) / ((1.0 + lam) * (1.0 + ratio))
    if not (0.0 < z2 < 1.0):
        raise NoInteriorSolution(f"x2**lam = {z2:.6g} is outside (0, 1)")
    x2 = _inverse_pow(z2, lam)
    z1 = z2 * (1.0 - lam / (1.0 + lam) * x2)
    return _inverse_pow(z1, lam), x2


def decompose_utility(x1: float, x2: float, skills: SkillParams, beta: float) -> tuple[float, float, float]:
    """(outcome, process, perceived) utility of the strategy (x1, x2)."""
    if not (0.0 < x1 < 1.0 and 0.0 < x2 < 1.0):
        raise DomainError("serve-in probabilities must lie in (0, 1)")
    outcome = x1 * skills.y(x1) + (1 - x1) * x2 * skills.y(x2)
    process = (beta - 1.0) * (x1 * skills.k(x1) + (1 - x1) * x2 * skills.k(x2))
    return outcome, process, outcome + process


def hessian_diagonal(x1: float, x2: float, skills: SkillParams, beta: float) -> tuple[float, float]:
    """Diagonal of the perceived-utility Hessian at a stationary point (off-diagonals vanish there)."""
    lam = skills.lam
    curv = 1.0 / skills.tau_f + beta / skills.tau_k
    h11 = -lam * (1 + lam) * _pow(x1, lam - 1) * curv
    h22 = -(1 - x1) * lam * (1 + lam) * _pow(x2, lam - 1) * curv
    return h11, h22


def check_soc(fit: StructuralFit) -> bool:
    h11, h22 = hessian_diagonal(fit.stats.x1, fit.stats.x2, fit.skills, fit.prefs.beta)
    return h11 <= 0.0 and h22 <= 0.0


def condition3(skills: SkillParams, beta: float) -> Condition3Report:
    tf, tk = skills.tau_f, skills.tau_k
    return Condition3Report(
        curvature=skills.lam > 1.0,
        slopes=tf > 0 and (tk > 0 or -tk > max(tf, beta * tf)),
        intercept=0.0 < skills.a < skills.lam + 1.0,
    )


def comparative_statics_sign(skills: SkillParams) -> StaticsSign:
    """Direction in which the optimal serve-in rates move as beta rises."""
    if skills.a_f == skills.a_k:
        return StaticsSign.INVARIANT
    s = skills.tau_k * (skills.a_f - skills.a_k)
    return StaticsSign.INCREASING if s < 0 else StaticsSign.DECREASING


def fit_player(stats: ServeStats, eps: float = DEFAULT_EPS) -> StructuralFit:
    """Full recovery for one player; failures carry the stage name."""
    try:
        lam, iterations, residual = bisect_lambda(stats.x1, stats.x2, eps)
    except (PreconditionFailed, BracketError, DomainError) as e:
        raise FitError("solve_lambda", e) from e
    try:
        skills = recover_slopes_constants(lam, stats)
    except DivisionByZero as e:
        raise FitError("recover_slopes_constants", e) from e
    try:
        prefs = recover_beta(lam, stats)
    except SingularDenominator as e:
        raise FitError("recover_beta", e) from e
    fit = StructuralFit(stats, skills, prefs, False, condition3(skills, prefs.beta), iterations, residual)
    return replace(fit, soc_ok=check_soc(fit))
