"""Alternative specifications: exponential win curves, unequal curvature of the two
rally types, and aversion to double faults with a smoothing-based diagnostic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .estimation import ServeStats
from .structural import DEFAULT_EPS, DivisionByZero, SingularDenominator, bisect_lambda

SCAN_LOW, SCAN_HIGH, SCAN_POINTS = 1e-3, 64.0, 2000
T_LOWER, T_UPPER = 1e-6, 10.0
T_RESIDUAL_TOL = 1e-6
MIN_DIAGNOSTIC_REPS = 100


class NoRoot(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


@dataclass(frozen=True)
class SoftmaxFit:
    lam: float
    a_f: float
    tau_f: float
    a_k: float
    tau_k: float
    beta: float
    residual: float
    sign_changes: int  # proper roots seen on the scan grid

    @property
    def delta(self) -> float:
        return self.beta - 1.0

    def f(self, x: float) -> float:
        return self.a_f + self.tau_f * math.exp(self.lam * x)

    def k(self, x: float) -> float:
        return self.a_k + self.tau_k * math.exp(self.lam * x)


@dataclass(frozen=True)
class CurvatureTFit:
    t: float
    lam: float
    a_f: float
    tau_f: float
    a_k: float
    tau_k: float
    beta: float
    solved: bool
    residual: float
    sign_changes: int

    @property
    def delta(self) -> float:
        return self.beta - 1.0


@dataclass(frozen=True)
class DoubleFaultFit:
    gamma: float
    lam: float
    a: float
    tau: float


@dataclass(frozen=True)
class GammaDiagnostic:
    player_id: str
    serve: int  # 1 or 2: which one-shot share multiplies gamma
    estimate: float
    lo: float
    hi: float
    significant: bool  # interval lies strictly above zero


def _bisect(g: Callable[[float], float], lo: float, hi: float, eps: float) -> float:
    g_lo = g(lo)
    while hi - lo >= eps:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = g(mid)
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(g, den) -> list[tuple[float, float]]:
    """Sign-change brackets of ``g`` on the log grid, skipping poles where ``den`` also flips."""
    grid = np.geomspace(SCAN_LOW, SCAN_HIGH, SCAN_POINTS)
    vals = [g(v) for v in grid]
    dens = [den(v) for v in grid]
    out = []
    for i in range(len(grid) - 1):
        if not (math.isfinite(vals[i]) and math.isfinite(vals[i + 1])):
            continue
        if (vals[i] < 0) != (vals[i + 1] < 0) and (dens[i] < 0) == (dens[i + 1] < 0):
            out.append((float(grid[i]), float(grid[i + 1])))
    return out


# ---------------------------------------------------------------- softmax

def softmax_fit(stats: ServeStats, eps: float = DEFAULT_EPS) -> SoftmaxFit:
    """Fit f(x) = a_f + tau_f*exp(lam*x) and its multi-shot analog."""
    s = stats
    if not (0.0 < s.x1 < s.x2 < 1.0):
        raise ValueError("need 0 < x1 < x2 < 1")
    if s.f1 == s.f2 or s.k1 == s.k2:
        raise DivisionByZero("df" if s.f1 == s.f2 else "dk")
    x1, x2 = s.x1, s.x2

    def den(lam):
        return x1 * math.exp(lam * x1) - x2 * (1 - x2) * math.exp(lam * x2)

    def g(lam):
        d = den(lam)
        return (math.exp(lam * x2) - math.exp(lam * x1)) / d - lam if d != 0 else math.nan

    brackets = _scan_roots(g, den)
    if not brackets:
        raise NoRoot(f"no fixed point on ({SCAN_LOW}, {SCAN_HIGH}]")
    lam = _bisect(g, *brackets[0], eps)
    z1, z2 = math.exp(lam * x1), math.exp(lam * x2)
    tau_f = (s.f2 - s.f1) / (z2 - z1)
    tau_k = (s.k2 - s.k1) / (z2 - z1)
    bden = s.k2 * (z2 - z1) + lam * (s.k2 - s.k1) * x2 * z2
    if bden == 0:
        raise SingularDenominator("multi-shot term of the second-serve condition is zero")
    beta = -(s.f2 * (z2 - z1) + lam * (s.f2 - s.f1) * x2 * z2) / bden
    return SoftmaxFit(lam, s.f1 - tau_f * z1, tau_f, s.k1 - tau_k * z1, tau_k, beta,
                      abs(g(lam)), len(brackets))


# ---------------------------------------------------------------- relative curvature t

def _t_parts(lam: float, t: float, s: ServeStats):
    z1, z2 = s.x1**lam, s.x2**lam
    w1, w2 = s.x1 ** (t * lam), s.x2 ** (t * lam)
    tau_f = -(z1 - z2) / (s.f1 - s.f2)
    tau_k = -(w1 - w2) / (s.k1 - s.k2)
    a_f = tau_f * s.f1 + z1
    a_k = tau_k * s.k1 + w1
    beta = -(a_f * tau_k - tau_k * (1 + lam) * z2) / (a_k * tau_f - tau_f * (1 + t * lam) * w2)
    R = beta * tau_f / tau_k
    num = a_f - z1 + R * (a_k - w1) - s.x2 * (a_f - z2 + R * (a_k - w2))
    den = z1 + t * w1 * R
    return num, den, (a_f, tau_f, a_k, tau_k, beta)


def curvature_t_fit(stats: ServeStats, t: float, eps: float = DEFAULT_EPS) -> CurvatureTFit:
    """Fit with multi-shot curvature ``t`` times the one-shot curvature.

    The update map is bisected on a fixed bracket with the rule "move the lower
    end up when the map falls below the midpoint".  A cell is unsolved when the
    final residual is not small or the iterate is pinned at the upper end.
    """
    s = stats
    if t <= 0:
        raise ValueError("t must be positive")
    if s.f1 == s.f2 or s.k1 == s.k2:
        raise DivisionByZero("df" if s.f1 == s.f2 else "dk")

    def update(lam):
        num, den, _ = _t_parts(lam, t, s)
        return num / den if den != 0 else math.inf

    lo, hi = T_LOWER, T_UPPER
    while hi - lo >= eps:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if update(mid) < mid:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    residual = abs(update(lam) - lam)
    solved = math.isfinite(residual) and residual <= T_RESIDUAL_TOL and lam < T_UPPER - 1e-6
    _, _, (a_f, tau_f, a_k, tau_k, beta) = _t_parts(lam, t, s)
    n_changes = len(_scan_roots(lambda v: update(v) - v, lambda v: _t_parts(v, t, s)[1]))
    return CurvatureTFit(t, lam, a_f, tau_f, a_k, tau_k, beta, solved, residual, n_changes)


# ---------------------------------------------------------------- double faults

def double_fault_fit(stats: ServeStats, eps: float = DEFAULT_EPS) -> DoubleFaultFit:
    """Outcome-maximizer with a utility cost ``gamma`` per double fault."""
    s = stats
    lam = bisect_lambda(s.x1, s.x2, eps)[0]
    if s.y1 == s.y2:
        raise SingularDenominator("y1 equals y2")
    z1, z2 = s.x1**lam, s.x2**lam
    tau = (z2 - z1) / (s.y1 - s.y2)
    a = tau * s.y2 + z2
    return DoubleFaultFit((z2 * (lam + 1) - a) / tau, lam, a, tau)


# ---------------------------------------------------------------- smoothing

def lowess(xs, ys, span: float = 0.5, at=None) -> np.ndarray:
    """Local-linear tricube smoother over standardized covariates.

    ``xs`` is (n,) or (n, d).  Fitted values are returned at ``at`` (default: ``xs``).
    """
    X = np.asarray(xs, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(ys, dtype=float)
    n = len(y)
    if n < 5:
        raise TooFewPoints(f"need at least 5 observations, got {n}")
    if not (0.0 < span <= 1.0):
        raise ValueError("span must lie in (0, 1]")
    Q = X if at is None else np.asarray(at, dtype=float).reshape(-1, X.shape[1])
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Xs, Qs = X / scale, Q / scale
    r = max(int(math.ceil(span * n)), X.shape[1] + 2)
    r = min(r, n)
    design = np.column_stack([np.ones(n), Xs])
    out = np.empty(len(Q))
    for i, q in enumerate(Qs):
        d = np.sqrt(((Xs - q) ** 2).sum(axis=1))
        h = np.sort(d)[r - 1]
        # widen slightly so the r-th neighbour keeps a positive weight
        h = h * 1.0001 if h > 0 else 1.0
        w = np.clip(1 - (d / h) ** 3, 0, None) ** 3
        sw = np.sqrt(w)
        coef, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
        out[i] = coef[0] + (q * coef[1:]).sum()
    return out


def gamma_diagnostic(fits: Mapping[str, tuple[DoubleFaultFit, ServeStats]], span: float = 0.5,
                     B: int = 300, seed: int = 0, level: float = 0.95) -> list[GammaDiagnostic]:
    """Smooth gamma*f_j on (x1, x2, y1, y2) and bootstrap players for percentile intervals."""
    players = sorted(fits)
    n = len(players)
    if n < 10:
        raise TooFewPoints(f"need at least 10 players, got {n}")
    if B < MIN_DIAGNOSTIC_REPS:
        raise ValueError(f"B must be at least {MIN_DIAGNOSTIC_REPS}")
    X = np.array([[st.x1, st.x2, st.y1, st.y2] for _, st in (fits[p] for p in players)])
    gam = np.array([fits[p][0].gamma for p in players])
    f = {1: np.array([fits[p][1].f1 for p in players]), 2: np.array([fits[p][1].f2 for p in players])}
    rngs = [np.random.default_rng(ss) for ss in np.random.SeedSequence(seed).spawn(B)]
    idx = [rng.integers(0, n, n) for rng in rngs]
    alpha = (1 - level) / 2
    out = []
    for j in (1, 2):
        target = gam * f[j]
        point = lowess(X, target, span)
        reps = np.array([lowess(X[ix], target[ix], span, at=X) for ix in idx])
        lo = np.quantile(reps, alpha, axis=0)
        hi = np.quantile(reps, 1 - alpha, axis=0)
        for i, p in enumerate(players):
            out.append(GammaDiagnostic(p, j, float(point[i]), float(lo[i]), float(hi[i]), bool(lo[i] > 0)))
    out.sort(key=lambda d: (d.player_id, d.serve))
    return out
