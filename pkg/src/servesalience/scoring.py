"""From point-win probability to game, tiebreak, set, match and prize money.

Standard scoring throughout: games to four points with deuce, sets to six games
won by two with a seven-point tiebreak at 6-6, and i.i.d. points and sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import IO


class InvalidBestOf(ValueError):
    pass


@dataclass(frozen=True)
class PrizeLadder:
    """``prizes[r]`` is paid on exit after winning ``r`` matches; ``prizes[rounds]`` to the champion."""

    rounds: int
    prizes: tuple[float, ...]

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("a ladder needs at least one round")
        if len(self.prizes) != self.rounds + 1:
            raise ValueError(f"expected {self.rounds + 1} prizes, got {len(self.prizes)}")
        if any(b < a for a, b in zip(self.prizes, self.prizes[1:])):
            raise ValueError("prizes must be non-decreasing by round")


@dataclass(frozen=True)
class ScoreChain:
    p_point_serve: float
    q_point_opp_serve: float
    p_game_hold: float
    p_set: float
    p_match: float
    best_of: int


def load_ladder(stream: IO[str]) -> PrizeLadder:
    raw = json.load(stream)
    return PrizeLadder(int(raw["rounds"]), tuple(float(v) for v in raw["prizes"]))


def game_prob(p: float) -> float:
    """Probability the server holds."""
    q = 1.0 - p
    # from deuce: win two in a row before losing two in a row
    deuce = p * p / (1.0 - 2.0 * p * q)
    return p**4 * (1 + 4 * q + 10 * q * q) + 20 * p**3 * q**3 * deuce


def _tiebreak_server_is_a(points_played: int) -> bool:
    # serve order A, BB, AA, BB, ...
    return ((points_played + 1) // 2) % 2 == 0


def tiebreak_prob(p_serve: float, p_return: float) -> float:
    """Probability player A, serving first, wins a first-to-7 win-by-2 tiebreak.

    ``p_serve`` is A's point-win probability on A's serve, ``p_return`` on B's serve.
    """
    win2 = p_serve * p_return
    lose2 = (1 - p_serve) * (1 - p_return)
    # from any tie at 6-all or later the next two points are one A serve and one B serve
    at_tie = 0.5 if win2 + lose2 == 0 else win2 / (win2 + lose2)

    @lru_cache(maxsize=None)
    def from_score(a: int, b: int) -> float:
        if a >= 7 and a - b >= 2:
            return 1.0
        if b >= 7 and b - a >= 2:
            return 0.0
        if a == b and a >= 6:
            return at_tie
        p = p_serve if _tiebreak_server_is_a(a + b) else p_return
        return p * from_score(a + 1, b) + (1 - p) * from_score(a, b + 1)

    return from_score(0, 0)


def set_prob(hold_a: float, hold_b: float, p_serve: float, p_return: float) -> float:
    """Probability player A, serving the first game, wins the set."""
    tb = tiebreak_prob(p_serve, p_return)

    @lru_cache(maxsize=None)
    def from_score(a: int, b: int) -> float:
        if (a >= 6 and a - b >= 2) or a == 7:
            return 1.0
        if (b >= 6 and b - a >= 2) or b == 7:
            return 0.0
        if a == 6 and b == 6:
            return tb
        g = hold_a if (a + b) % 2 == 0 else 1.0 - hold_b
        return g * from_score(a + 1, b) + (1 - g) * from_score(a, b + 1)

    return from_score(0, 0)


def match_prob(p_set: float, best_of: int = 5) -> float:
    """Probability of winning a best-of-``best_of`` match with i.i.d. sets."""
    if best_of < 1 or best_of % 2 == 0:
        raise InvalidBestOf(f"best_of must be a positive odd integer, got {best_of}")
    need = (best_of + 1) // 2
    q = 1.0 - p_set
    return sum(comb(need - 1 + j, j) * p_set**need * q**j for j in range(need))


def expected_prize(q_match: float, ladder: PrizeLadder) -> float:
    """Expected payout when every match is won independently with probability ``q_match``."""
    R = ladder.rounds
    total = sum(q_match**r * (1 - q_match) * ladder.prizes[r] for r in range(R))
    return total + q_match**R * ladder.prizes[R]


def score_chain(p_serve: float, p_opp_serve: float, best_of: int = 5) -> ScoreChain:
    """Chain for a player winning ``p_serve`` of own service points against an
    opponent who wins ``p_opp_serve`` of theirs."""
    hold_a = game_prob(p_serve)
    hold_b = game_prob(p_opp_serve)
    q = 1.0 - p_opp_serve
    s = set_prob(hold_a, hold_b, p_serve, q)
    return ScoreChain(p_serve, q, hold_a, s, match_prob(s, best_of), best_of)
