"""Point-by-point serve records and their aggregation into binomial counts.

Each CSV row is one serve attempt.  A service point whose first serve is a
fault has two rows (a ``First`` row with ``serve_in=false`` followed by a
``Second`` row); every other point has a single ``First`` row.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import IO, Iterable, Mapping

POINT_COLUMNS = ("match_id", "server_id", "serve_number", "serve_in", "rally_length", "server_won")
COUNT_COLUMNS = ("player_id", "n_matches", "N", "n_x1", "n_x2", "n_f1", "n_f2", "n_k1", "n_k2")

_BOOLS = {"true": True, "false": False}
_SERVE_NUMBERS = ("First", "Second")


class IngestError(ValueError):
    """Base class for malformed point data."""


class EmptyFile(IngestError):
    pass


class MissingColumn(IngestError):
    def __init__(self, column: str):
        super().__init__(f"missing column {column!r}")
        self.column = column


class FieldTypeError(IngestError):
    """A field could not be converted to its declared type."""

    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}: bad value {value!r} for column {column!r}")
        self.row = row
        self.column = column


class InconsistentOutcome(IngestError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row


@dataclass(frozen=True)
class PointRecord:
    match_id: str
    server_id: str
    serve_number: str  # "First" or "Second"
    serve_in: bool
    rally_length: int
    server_won: bool


@dataclass
class ServeCounts:
    player_id: str
    N: int = 0
    n_x1: int = 0
    n_x2: int = 0
    n_f1: int = 0
    n_f2: int = 0
    n_k1: int = 0
    n_k2: int = 0
    n_matches: int = 0

    def check(self) -> None:
        """Raise ValueError if the tallies cannot come from the serve tree."""
        for f in fields(self):
            if f.name != "player_id" and getattr(self, f.name) < 0:
                raise ValueError(f"{self.player_id}: negative count {f.name}")
        if not (self.n_f1 + self.n_k1 <= self.n_x1 <= self.N):
            raise ValueError(f"{self.player_id}: first-serve counts out of order")
        if not (self.n_x2 <= self.N - self.n_x1):
            raise ValueError(f"{self.player_id}: more second serves in than first-serve faults")
        if not (self.n_f2 + self.n_k2 <= self.n_x2):
            raise ValueError(f"{self.player_id}: second-serve counts out of order")


def _check_outcome(row: int, serve_in: bool, length: int, won: bool) -> None:
    if not serve_in:
        if length != 0 or won:
            raise InconsistentOutcome(row, "a fault must have rally_length 0 and server_won false")
        return
    if length < 1:
        raise InconsistentOutcome(row, "a serve that lands in has rally_length >= 1")
    if won != (length % 2 == 1):
        raise InconsistentOutcome(row, "the server wins exactly the odd-length rallies")


def parse_points_csv(stream: IO[bytes] | IO[str]) -> list[PointRecord]:
    """Read the normalized points CSV; rows are numbered from 1 after the header."""
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")
    if not text.strip():
        raise EmptyFile("no header row")
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    for col in POINT_COLUMNS:
        if col not in header:
            raise MissingColumn(col)
    reader.fieldnames = header

    records = []
    for i, raw in enumerate(reader, start=1):
        vals = {k: (raw.get(k) or "").strip() for k in POINT_COLUMNS}
        for col in ("match_id", "server_id"):
            if not vals[col]:
                raise FieldTypeError(i, col, vals[col])
        if vals["serve_number"] not in _SERVE_NUMBERS:
            raise FieldTypeError(i, "serve_number", vals["serve_number"])
        flags = {}
        for col in ("serve_in", "server_won"):
            v = vals[col].lower()
            if v not in _BOOLS:
                raise FieldTypeError(i, col, vals[col])
            flags[col] = _BOOLS[v]
        if not vals["rally_length"].isdigit():
            raise FieldTypeError(i, "rally_length", vals["rally_length"])
        length = int(vals["rally_length"])
        _check_outcome(i, flags["serve_in"], length, flags["server_won"])
        records.append(PointRecord(vals["match_id"], vals["server_id"], vals["serve_number"],
                                   flags["serve_in"], length, flags["server_won"]))
    return records


def aggregate_counts(points: Iterable[PointRecord], min_matches: int = 20) -> dict[str, ServeCounts]:
    """Tally serve-tree leaves per server, dropping servers seen in fewer than ``min_matches`` matches."""
    if min_matches < 1:
        raise ValueError("min_matches must be at least 1")
    counts: dict[str, ServeCounts] = {}
    matches: dict[str, set[str]] = {}
    for p in points:
        c = counts.setdefault(p.server_id, ServeCounts(p.server_id))
        matches.setdefault(p.server_id, set()).add(p.match_id)
        first = p.serve_number == "First"
        if first:
            c.N += 1
        if not p.serve_in:
            continue
        one_shot = p.rally_length == 1
        multi_won = p.server_won and p.rally_length >= 3
        if first:
            c.n_x1 += 1
            c.n_f1 += one_shot
            c.n_k1 += multi_won
        else:
            c.n_x2 += 1
            c.n_f2 += one_shot
            c.n_k2 += multi_won
    out = {}
    for pid in sorted(counts):
        c = counts[pid]
        c.n_matches = len(matches[pid])
        if c.n_matches >= min_matches:
            out[pid] = c
    return out


def write_counts_csv(counts: Mapping[str, ServeCounts], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COUNT_COLUMNS)
    for pid in sorted(counts):
        c = counts[pid]
        w.writerow([pid] + [getattr(c, col) for col in COUNT_COLUMNS[1:]])


def read_counts_csv(stream: IO[str]) -> dict[str, ServeCounts]:
    reader = csv.DictReader(stream)
    for col in COUNT_COLUMNS:
        if col not in (reader.fieldnames or []):
            raise MissingColumn(col)
    out = {}
    for i, row in enumerate(reader, start=1):
        vals = {}
        for col in COUNT_COLUMNS[1:]:
            try:
                vals[col] = int(row[col])
            except (TypeError, ValueError):
                raise FieldTypeError(i, col, row[col]) from None
        c = ServeCounts(row["player_id"], **vals)
        c.check()
        out[c.player_id] = c
    return out
