"""Model-free bounds on the salience weight.

Comparing the observed strategy with two feasible deviations (serving the
first-serve rate on both serves, or the second-serve rate on both) gives
linear inequalities ``A + delta * B >= 0`` in the salience weight.  A second
check asks whether the observed one-shot win rates sit in the region where a
positive weight is guaranteed, and measures how much of the feasible triangle
that region leaves out.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .estimation import ServeStats

DEFAULT_RATIO_THRESHOLD = 0.114


class ConditionBFailed(ValueError):
    pass


class Endpoint(str, enum.Enum):
    X1_STAR = "X1Star"
    X2_STAR = "X2Star"


class SignConclusion(str, enum.Enum):
    POSITIVE_LOWER_BOUND = "PositiveLowerBound"
    LIKELY_POSITIVE = "LikelyPositive"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class EndpointABC:
    at: Endpoint
    A: float
    B: float
    C: float


@dataclass(frozen=True)
class BoundsResult:
    lower: float
    upper: float
    abc_x1: EndpointABC
    abc_x2: EndpointABC
    lemma1_b: bool
    lemma1_c: bool
    sign_conclusion: SignConclusion

    @property
    def lemma1_ok(self) -> bool:
        return self.lemma1_b and self.lemma1_c


@dataclass(frozen=True)
class TriangleGeometry:
    b12: float
    x12: float
    x14: float
    x24: float
    A1: float
    A2: float
    ratio: float | None  # None when the triangle is degenerate


def _p(x1: float, x2: float, w1: float, w2: float) -> float:
    return x1 * w1 + (1 - x1) * x2 * w2


def endpoint_abc(stats: ServeStats, at: Endpoint) -> EndpointABC:
    """Gain from (x0, x2) over (x1, x1), split into multi-shot (B) and one-shot (C) parts."""
    s = stats
    if at == Endpoint.X1_STAR:
        x0, f0, k0 = s.x1, s.f1, s.k1
    else:
        x0, f0, k0 = s.x2, s.f2, s.k2
    B = x0 * k0 + (1 - x0) * s.x2 * s.k2 - (2 - s.x1) * s.x1 * s.k1
    C = x0 * f0 + (1 - x0) * s.x2 * s.f2 - (2 - s.x1) * s.x1 * s.f1
    return EndpointABC(Endpoint(at), B + C, B, C)


def _intersect(lower: float, upper: float, A: float, B: float) -> tuple[float, float]:
    if B > 0:
        lower = max(lower, -A / B)
    elif B < 0:
        upper = min(upper, -A / B)
    return lower, upper


def optimality_bounds(stats: ServeStats) -> BoundsResult:
    s = stats
    y1, y2 = s.y1, s.y2
    observed, observed_k = _p(s.x1, s.x2, y1, y2), _p(s.x1, s.x2, s.k1, s.k2)
    # deviation 1: first-serve rate on both serves
    A1 = observed - _p(s.x1, s.x1, y1, y1)
    B1 = observed_k - _p(s.x1, s.x1, s.k1, s.k1)
    # deviation 2: second-serve rate on both serves
    A2 = observed - _p(s.x2, s.x2, y2, y2)
    B2 = observed_k - _p(s.x2, s.x2, s.k2, s.k2)
    lower, upper = _intersect(-math.inf, math.inf, A1, B1)
    lower, upper = _intersect(lower, upper, A2, B2)

    e1 = endpoint_abc(s, Endpoint.X1_STAR)
    e2 = endpoint_abc(s, Endpoint.X2_STAR)
    cond_b = e1.B > e1.A > 0
    cond_c = e2.B > 0 > e2.A
    sign = SignConclusion.POSITIVE_LOWER_BOUND if lower > 0 else SignConclusion.INCONCLUSIVE
    return BoundsResult(lower, upper, e1, e2, cond_b, cond_c, sign)


def lemma2_geometry(stats: ServeStats) -> TriangleGeometry:
    """Feasibility triangle for the one-shot win shares and the sub-triangle violating the sufficient condition."""
    s = stats
    m1, m2 = s.x1 * s.f1, s.x2 * s.f2
    if not m1 > m2:
        raise ConditionBFailed(f"x1*f1 = {m1:.6g} is not above x2*f2 = {m2:.6g}")
    b12 = (2 - s.x1) * m1 - m2
    x12 = m2 * s.x1 / ((1 - s.x2) * m1 + m2 * s.x1)
    x14 = b12 * s.x1 / (m1 - m2 * s.x1)
    x24 = (m2 - (1 - s.x2) * b12) / (m2 * (2 - s.x2))
    A1 = 0.5 * abs(s.x2 * (s.f1 - s.f2) * (x12 - s.x1))
    if x14 < x24:
        A2 = 0.5 * abs((x12 - x14) * (m2 / (1 - s.x2) * (1 - x24) - s.f1 * x24))
    else:
        A2 = 0.0
    ratio = A2 / A1 if A1 > 0 else None
    return TriangleGeometry(b12, x12, x14, x24, A1, A2, ratio)


def classify_player(stats: ServeStats, ratio_threshold: float = DEFAULT_RATIO_THRESHOLD) -> SignConclusion:
    b = optimality_bounds(stats)
    if b.sign_conclusion == SignConclusion.POSITIVE_LOWER_BOUND:
        return b.sign_conclusion
    if not b.lemma1_ok:
        return SignConclusion.INCONCLUSIVE
    try:
        geo = lemma2_geometry(stats)
    except ConditionBFailed:
        return SignConclusion.INCONCLUSIVE
    if geo.ratio is not None and geo.ratio <= ratio_threshold:
        return SignConclusion.LIKELY_POSITIVE
    return SignConclusion.INCONCLUSIVE
