"""Parametric bootstrap over the serve tree."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .estimation import ServeStats, mle_stats
from .ingest import ServeCounts
from .structural import fit_player

STRUCTURAL_PARAMS = ("delta", "lambda", "tau_f", "a_f", "tau_k", "a_k")
STRUCTURAL_REFERENCES = (0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
MAX_FAILURE_SHARE = 0.2


class DegenerateProbability(ValueError):
    pass


class TooManyFailures(RuntimeError):
    def __init__(self, failed: int, total: int):
        super().__init__(f"{failed} of {total} replicates failed")
        self.failed = failed
        self.total = total


@dataclass(frozen=True)
class BootstrapConfig:
    replications: int = 300
    level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("replications must be at least 2")
        if not (0.0 < self.level < 1.0):
            raise ValueError("level must lie in (0, 1)")


@dataclass(frozen=True)
class IntervalEstimate:
    param: str
    point: float
    lo: float
    hi: float
    significant: bool
    failed_reps: int


def _edge(k: float, f: float) -> float:
    if f >= 1.0:
        return 0.0
    p = k / (1.0 - f)
    if not (0.0 <= p <= 1.0 + 1e-12):
        raise DegenerateProbability(f"k/(1-f) = {p:.6g} is not a probability")
    return min(p, 1.0)


def resample_counts(counts: ServeCounts, stats: ServeStats, rng: np.random.Generator) -> ServeCounts:
    """One draw of the serve tree with ``counts.N`` service points."""
    e1, e2 = _edge(stats.k1, stats.f1), _edge(stats.k2, stats.f2)
    N = counts.N
    n_x1 = int(rng.binomial(N, stats.x1))
    n_x2 = int(rng.binomial(N - n_x1, stats.x2))
    n_f1 = int(rng.binomial(n_x1, stats.f1))
    n_k1 = int(rng.binomial(n_x1 - n_f1, e1))
    n_f2 = int(rng.binomial(n_x2, stats.f2))
    n_k2 = int(rng.binomial(n_x2 - n_f2, e2))
    return ServeCounts(counts.player_id, N, n_x1, n_x2, n_f1, n_f2, n_k1, n_k2, counts.n_matches)


def replicate_rngs(cfg: BootstrapConfig) -> list[np.random.Generator]:
    """One independent generator per replicate index, derived from the seed alone."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.replications)]


def bootstrap_ci(counts: ServeCounts, estimator: Callable[[ServeCounts], Sequence[float] | None],
                 cfg: BootstrapConfig = BootstrapConfig(), names: Sequence[str] | None = None,
                 references: Sequence[float] | None = None,
                 stats: ServeStats | None = None) -> list[IntervalEstimate]:
    """Percentile intervals for every component of ``estimator``.

    Replicates are drawn from ``stats`` (default: the frequencies of ``counts``).
    An estimator signals failure by raising ``ValueError`` or returning ``None``;
    such replicates are dropped and counted.
    """
    point = np.asarray(estimator(counts), dtype=float)
    gen = mle_stats(counts) if stats is None else stats
    draws, failed = [], 0
    for rng in replicate_rngs(cfg):
        try:
            v = estimator(resample_counts(counts, gen, rng))
        except (ValueError, ArithmeticError):
            v = None
        if v is None or not np.all(np.isfinite(v)):
            failed += 1
            continue
        draws.append(np.asarray(v, dtype=float))
    if failed > MAX_FAILURE_SHARE * cfg.replications or not draws:
        raise TooManyFailures(failed, cfg.replications)
    reps = np.vstack(draws)
    alpha = (1 - cfg.level) / 2
    lo = np.quantile(reps, alpha, axis=0)
    hi = np.quantile(reps, 1 - alpha, axis=0)
    names = list(names) if names is not None else [f"p{i}" for i in range(len(point))]
    refs = list(references) if references is not None else [0.0] * len(point)
    return [
        IntervalEstimate(n, float(pt), float(l), float(h), bool(not (l <= r <= h)), failed)
        for n, pt, l, h, r in zip(names, point, lo, hi, refs)
    ]


def structural_estimator(counts: ServeCounts) -> tuple[float, ...]:
    fit = fit_player(mle_stats(counts))
    sk = fit.skills
    return (fit.prefs.delta, sk.lam, sk.tau_f, sk.a_f, sk.tau_k, sk.a_k)


def structural_ci(counts: ServeCounts, cfg: BootstrapConfig = BootstrapConfig(),
                  stats: ServeStats | None = None) -> list[IntervalEstimate]:
    return bootstrap_ci(counts, structural_estimator, cfg, STRUCTURAL_PARAMS, STRUCTURAL_REFERENCES, stats)
