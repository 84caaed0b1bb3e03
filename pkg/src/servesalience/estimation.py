"""Binomial maximum likelihood for the six serve probabilities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Mapping

from scipy.special import gammaln, xlog1py, xlogy

from .ingest import FieldTypeError, MissingColumn, ServeCounts

STATS_COLUMNS = ("player_id", "x1", "x2", "f1", "f2", "k1", "k2")


class DegenerateCounts(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ServeStats:
    x1: float
    x2: float
    f1: float
    f2: float
    k1: float
    k2: float

    def __post_init__(self):
        for name in ("x1", "x2", "f1", "f2", "k1", "k2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} is not a probability")
        if self.f1 + self.k1 > 1 + 1e-12 or self.f2 + self.k2 > 1 + 1e-12:
            raise ValueError("one-shot plus multi-shot win share exceeds 1")

    @property
    def y1(self) -> float:
        return self.f1 + self.k1

    @property
    def y2(self) -> float:
        return self.f2 + self.k2

    def point_win(self) -> float:
        """Probability of winning a service point at the observed strategy."""
        return self.x1 * self.y1 + (1 - self.x1) * self.x2 * self.y2

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x1, self.x2, self.f1, self.f2, self.k1, self.k2)


@dataclass(frozen=True)
class DataConditionReport:
    a1_holds: bool
    a2_holds: bool
    a3_holds: bool
    details: str

    @property
    def all_hold(self) -> bool:
        return self.a1_holds and self.a2_holds and self.a3_holds


def mle_stats(counts: ServeCounts) -> ServeStats:
    """Sample frequencies along the serve tree."""
    c = counts
    for name, den in (("N", c.N), ("n_x1", c.n_x1), ("n_x2", c.n_x2), ("N - n_x1", c.N - c.n_x1)):
        if den <= 0:
            raise DegenerateCounts(f"{c.player_id}: {name} is zero")
    return ServeStats(
        x1=c.n_x1 / c.N,
        x2=c.n_x2 / (c.N - c.n_x1),
        f1=c.n_f1 / c.n_x1,
        f2=c.n_f2 / c.n_x2,
        k1=c.n_k1 / c.n_x1,
        k2=c.n_k2 / c.n_x2,
    )


def _binom_term(k: int, n: int, p: float) -> float:
    if n == 0:
        return 0.0
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"success probability {p} outside [0, 1]")
    if (p == 0.0 and k > 0) or (p == 1.0 and k < n):
        raise DomainError(f"probability {p} is impossible for {k} successes in {n} trials")
    log_coef = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return float(log_coef + xlogy(k, p) + xlog1py(n - k, -p))


def _conditional(k: float, f: float) -> float:
    # multi-shot win probability among rallies that did not end on the serve
    if f >= 1.0:
        return 0.0
    return k / (1.0 - f)


def log_likelihood(counts: ServeCounts, stats: ServeStats) -> float:
    """Sum of the six binomial log-likelihood terms of the serve tree."""
    c, s = counts, stats
    return (
        _binom_term(c.n_x1, c.N, s.x1)
        + _binom_term(c.n_x2, c.N - c.n_x1, s.x2)
        + _binom_term(c.n_f1, c.n_x1, s.f1)
        + _binom_term(c.n_f2, c.n_x2, s.f2)
        + _binom_term(c.n_k1, c.n_x1 - c.n_f1, _conditional(s.k1, s.f1))
        + _binom_term(c.n_k2, c.n_x2 - c.n_f2, _conditional(s.k2, s.f2))
    )


def validate_theorem_conditions(x1: float, x2: float) -> DataConditionReport:
    """Check the three data conditions under which the curvature fixed point exists and is unique."""
    a1 = 0.0 < x1 < x2 < 1.0
    a2 = x1 > 0.0 and x2 > 0.0 and math.log(x2 / x1) < x2
    a3 = 2.0 * (x2 - x1) < x2 * x2
    failed = [n for n, ok in (("A1: 0<x1<x2<1", a1), ("A2: ln(x2/x1)<x2", a2), ("A3: 2(x2-x1)<x2^2", a3)) if not ok]
    details = "all conditions hold" if not failed else "failed " + ", ".join(failed)
    return DataConditionReport(a1, a2, a3, f"x1={x1:.6g}, x2={x2:.6g}: {details}")


def write_stats_csv(stats: Mapping[str, ServeStats], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    for pid in sorted(stats):
        w.writerow([pid] + [f"{v:.15g}" for v in stats[pid].as_tuple()])


def read_stats_csv(stream: IO[str]) -> tuple[dict[str, ServeStats], dict[str, int]]:
    """Read a stats table; an optional ``N`` column gives the number of service points."""
    reader = csv.DictReader(stream)
    names = reader.fieldnames or []
    for col in STATS_COLUMNS:
        if col not in names:
            raise MissingColumn(col)
    stats, sizes = {}, {}
    for i, row in enumerate(reader, start=1):
        vals = []
        for col in STATS_COLUMNS[1:]:
            try:
                vals.append(float(row[col]))
            except (TypeError, ValueError):
                raise FieldTypeError(i, col, row[col]) from None
        pid = row["player_id"]
        stats[pid] = ServeStats(*vals)
        if "N" in names and row["N"]:
            sizes[pid] = int(row["N"])
    return stats, sizes
