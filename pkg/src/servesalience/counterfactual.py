"""What a player would gain by serving to maximize points won rather than perceived utility."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scoring import PrizeLadder, expected_prize, game_prob, match_prob, set_prob
from .structural import NoInteriorSolution, StructuralFit


@dataclass(frozen=True)
class CounterfactualReport:
    """Deltas are counterfactual minus observed, in percentage points (prize in currency)."""

    delta: float
    delta_x1: float
    delta_x2: float
    delta_point: float
    delta_game: float
    delta_set: float
    delta_match: float
    delta_prize: float
    baseline_point: float


def reoptimize_at_beta_one(fit: StructuralFit) -> tuple[float, float, float]:
    """Point-maximizing strategy under the fitted win curves and its point-win probability."""
    sk = fit.skills
    lam, a, tau = sk.lam, sk.a, sk.tau
    if tau <= 0:
        raise NoInteriorSolution(f"aggregate slope tau = {tau:.6g} is not positive")
    z2 = a / (lam + 1.0)
    if not (0.0 < z2 < 1.0):
        raise NoInteriorSolution(f"a/(lam+1) = {z2:.6g} is outside (0, 1)")
    x2 = math.exp(math.log(z2) / lam)
    z1 = z2 * (1.0 - lam / (1.0 + lam) * x2)
    x1 = math.exp(math.log(z1) / lam)
    p = x1 * (a - z1) / tau + (1 - x1) * x2 * (a - z2) / tau
    return x1, x2, p


def counterfactual_report(fit: StructuralFit, ladder: PrizeLadder, best_of: int = 5) -> CounterfactualReport:
    """Propagate the re-optimized point probability to game, set, match and prize money.

    The opponent mirrors the player's observed service-point probability, so the
    baseline set and match odds are exactly one half.
    """
    s = fit.stats
    p0 = s.point_win()
    x1c, x2c, pc = reoptimize_at_beta_one(fit)

    hold0 = game_prob(p0)
    hold_c = game_prob(pc)
    set0 = set_prob(hold0, hold0, p0, 1 - p0)
    set_c = set_prob(hold_c, hold0, pc, 1 - p0)
    m0 = match_prob(set0, best_of)
    m_c = match_prob(set_c, best_of)
    dmatch = m_c - m0
    prize = expected_prize(0.5 + dmatch, ladder) - expected_prize(0.5, ladder)
    return CounterfactualReport(
        delta=fit.prefs.delta,
        delta_x1=100 * (x1c - s.x1),
        delta_x2=100 * (x2c - s.x2),
        delta_point=100 * (pc - p0),
        delta_game=100 * (hold_c - hold0),
        delta_set=100 * (set_c - set0),
        delta_match=100 * dmatch,
        delta_prize=prize,
        baseline_point=p0,
    )
