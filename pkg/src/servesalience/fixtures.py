"""Bundled reference inputs: twelve players' serve statistics and a Grand Slam prize ladder."""

from __future__ import annotations

import io
from importlib import resources

from .estimation import ServeStats, read_stats_csv
from .ingest import ServeCounts
from .scoring import PrizeLadder, load_ladder


def _data(name: str) -> str:
    return resources.files("servesalience").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def fixture_stats() -> dict[str, ServeStats]:
    """Career serve statistics for twelve ATP players, rounded to three decimals."""
    return read_stats_csv(io.StringIO(_data("fixture_players.csv")))[0]


def fixture_sizes() -> dict[str, int]:
    """Approximate number of charted service points per fixture player."""
    return read_stats_csv(io.StringIO(_data("fixture_players.csv")))[1]


def counts_from_stats(player_id: str, stats: ServeStats, N: int) -> ServeCounts:
    """Integer tallies whose frequencies are as close to ``stats`` as ``N`` allows."""
    n_x1 = round(N * stats.x1)
    n_x2 = round((N - n_x1) * stats.x2)
    n_f1 = round(n_x1 * stats.f1)
    n_k1 = min(round(n_x1 * stats.k1), n_x1 - n_f1)
    n_f2 = round(n_x2 * stats.f2)
    n_k2 = min(round(n_x2 * stats.k2), n_x2 - n_f2)
    return ServeCounts(player_id, N, n_x1, n_x2, n_f1, n_f2, n_k1, n_k2)


def us_open_2025_ladder() -> PrizeLadder:
    return load_ladder(io.StringIO(_data("us_open_2025_men.json")))
