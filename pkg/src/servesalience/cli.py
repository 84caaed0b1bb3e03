"""Command-line entry point.

    servesalience ingest --input points.csv --out results/
    servesalience estimate --out results/            # bundled 12-player table
    servesalience counterfactual --prizes ladder.json --out results/
    servesalience robustness --t-grid 0.5,1,1.5 --out results/
    servesalience bootstrap --seed 7 --out results/

Exit codes: 0 ok, 1 internal error, 2 bad input data, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Callable

import numpy as np

from . import bounds as bd
from .bootstrap import BootstrapConfig, TooManyFailures, structural_ci
from .counterfactual import counterfactual_report
from .estimation import ServeStats, mle_stats, read_stats_csv, write_stats_csv
from .fixtures import counts_from_stats, us_open_2025_ladder
from .ingest import IngestError, ServeCounts, aggregate_counts, parse_points_csv, read_counts_csv, write_counts_csv
from .robustness import TooFewPoints, curvature_t_fit, double_fault_fit, gamma_diagnostic, softmax_fit
from .scoring import load_ladder
from .structural import DEFAULT_EPS, FitError, StructuralFit, fit_player, lambda_map

log = logging.getLogger("servesalience")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3
DEFAULT_T_GRID = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)

FIT_COLUMNS = ("player_id", "delta", "beta", "lambda", "tau_f", "a_f", "tau_k", "a_k", "a", "tau",
               "soc_ok", "cond3_i", "cond3_ii", "cond3_iii", "residual", "iterations")
BOUNDS_COLUMNS = ("player_id", "lower", "upper", "lemma1_b", "lemma1_c", "b12", "x12", "x14", "x24",
                  "A1", "A2", "ratio", "classification")
COUNTER_COLUMNS = ("player_id", "delta", "dx1", "dx2", "dpt", "dgm", "dset", "dmat", "dprize")
CI_COLUMNS = ("player_id", "param", "point", "lo", "hi", "significant", "failed_reps")


class InputError(Exception):
    pass


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- inputs

class Dataset:
    """Per-player stats, plus counts when the input carried them (or a sample size)."""

    def __init__(self, stats: dict[str, ServeStats], counts: dict[str, ServeCounts]):
        self.stats = stats
        self.counts = counts


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None


def load_dataset(path: str | None) -> Dataset:
    """Counts CSV, stats CSV (optionally with ``N``), or the bundled fixture when ``path`` is None."""
    if path is None:
        from .fixtures import fixture_sizes, fixture_stats
        stats, sizes = fixture_stats(), fixture_sizes()
        return Dataset(stats, {p: counts_from_stats(p, s, sizes[p]) for p, s in stats.items() if p in sizes})
    text = _read_text(Path(path))
    header = text.splitlines()[0] if text.strip() else ""
    try:
        if "n_x1" in header.split(","):
            counts = read_counts_csv(io.StringIO(text))
            stats = {}
            for p, c in counts.items():
                try:
                    stats[p] = mle_stats(c)
                except ValueError as e:
                    log.warning("%s: %s", p, e)
            return Dataset(stats, counts)
        if not header:
            return Dataset({}, {})
        stats, sizes = read_stats_csv(io.StringIO(text))
    except (IngestError, ValueError, KeyError) as e:
        raise InputError(f"{path}: {e}") from None
    return Dataset(stats, {p: counts_from_stats(p, stats[p], n) for p, n in sizes.items()})


def load_prizes(path: str | None):
    if path is None:
        return us_open_2025_ladder()
    try:
        return load_ladder(io.StringIO(_read_text(Path(path))))
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: bad prize ladder: {e}") from None


# ---------------------------------------------------------------- outputs

def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(v)
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.15g}"


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def write_table(out: Path, name: str, columns, rows: list[dict], fmt: str,
                cell: Callable = _num) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{name}.json"
        data = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    else:
        path = out / f"{name}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([cell(r.get(c)) if c != "player_id" else r[c] for c in columns])
    return path


def fit_row(pid: str, fit: StructuralFit) -> dict:
    sk, c3 = fit.skills, fit.condition3
    return {"player_id": pid, "delta": fit.prefs.delta, "beta": fit.prefs.beta, "lambda": sk.lam,
            "tau_f": sk.tau_f, "a_f": sk.a_f, "tau_k": sk.tau_k, "a_k": sk.a_k, "a": sk.a, "tau": sk.tau,
            "soc_ok": fit.soc_ok, "cond3_i": c3.curvature, "cond3_ii": c3.slopes, "cond3_iii": c3.intercept,
            "residual": fit.residual, "iterations": fit.iterations}


def bounds_row(pid: str, stats: ServeStats, threshold: float) -> dict:
    b = bd.optimality_bounds(stats)
    row = {"player_id": pid, "lower": b.lower, "upper": b.upper, "lemma1_b": b.lemma1_b, "lemma1_c": b.lemma1_c,
           "classification": bd.classify_player(stats, threshold).value}
    try:
        g = bd.lemma2_geometry(stats)
        row.update(b12=g.b12, x12=g.x12, x14=g.x14, x24=g.x24, A1=g.A1, A2=g.A2, ratio=g.ratio)
    except bd.ConditionBFailed:
        pass
    return row


def _fit_all(data: Dataset, eps: float) -> tuple[dict[str, StructuralFit], list[dict]]:
    fits, failures = {}, []
    for pid in sorted(data.stats):
        try:
            fits[pid] = fit_player(data.stats[pid], eps)
        except FitError as e:
            log.warning("%s: %s", pid, e)
            failures.append({"player_id": pid, "stage": e.stage, "message": str(e.cause)})
    return fits, failures


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    text = _read_text(Path(args.input)) if args.input else None
    if text is None:
        raise ConfigError("ingest needs --input")
    try:
        points = parse_points_csv(io.StringIO(text))
    except IngestError as e:
        raise InputError(f"{args.input}: {e}") from None
    counts = aggregate_counts(points, args.min_matches)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "counts.csv").open("w", newline="", encoding="utf-8") as fh:
        write_counts_csv(counts, fh)
    return EXIT_OK


def cmd_estimate(args) -> int:
    data = load_dataset(args.input)
    out = Path(args.out)
    fits, failures = _fit_all(data, args.eps)
    write_table(out, "fits", FIT_COLUMNS, [fit_row(p, f) for p, f in fits.items()], args.format)
    write_table(out, "bounds", BOUNDS_COLUMNS,
                [bounds_row(p, data.stats[p], args.ratio_threshold) for p in sorted(data.stats)], args.format)
    write_table(out, "failures", ("player_id", "stage", "message"), failures, args.format, cell=str)
    with (out / "stats.csv").open("w", newline="", encoding="utf-8") as fh:
        write_stats_csv(data.stats, fh)

    curves, maps = [], []
    for pid, fit in fits.items():
        for x in np.linspace(0.3, 0.99, 70):
            curves.append({"player_id": pid, "x": x, "f": fit.skills.f(x), "k": fit.skills.k(x)})
        s = fit.stats
        for lam in np.linspace(0.05, 2 * fit.skills.lam, 80):
            maps.append({"player_id": pid, "lambda": lam, "map": lambda_map(lam, s.x1, s.x2)})
    write_table(out, "series_skills", ("player_id", "x", "f", "k"), curves, "csv")
    write_table(out, "series_lambda_map", ("player_id", "lambda", "map"), maps, "csv")
    return EXIT_OK


def cmd_bounds(args) -> int:
    data = load_dataset(args.input)
    rows = [bounds_row(p, data.stats[p], args.ratio_threshold) for p in sorted(data.stats)]
    write_table(Path(args.out), "bounds", BOUNDS_COLUMNS, rows, args.format)
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    data = load_dataset(args.input)
    ladder = load_prizes(args.prizes)
    fits, failures = _fit_all(data, args.eps)
    rows = []
    for pid, fit in fits.items():
        try:
            r = counterfactual_report(fit, ladder, args.best_of)
        except ValueError as e:
            log.warning("%s: %s", pid, e)
            failures.append({"player_id": pid, "stage": "counterfactual", "message": str(e)})
            continue
        rows.append({"player_id": pid, "delta": r.delta, "dx1": r.delta_x1, "dx2": r.delta_x2,
                     "dpt": r.delta_point, "dgm": r.delta_game, "dset": r.delta_set,
                     "dmat": r.delta_match, "dprize": r.delta_prize})
    write_table(Path(args.out), "counterfactual", COUNTER_COLUMNS, rows, args.format,
                cell=lambda v: f"{v:.2f}")
    write_table(Path(args.out), "failures", ("player_id", "stage", "message"), failures, args.format, cell=str)
    return EXIT_OK


def cmd_robustness(args) -> int:
    data = load_dataset(args.input)
    out = Path(args.out)
    soft, dfault, delta_grid, lam_grid = [], [], [], []
    pairs = {}
    for pid in sorted(data.stats):
        s = data.stats[pid]
        try:
            sm = softmax_fit(s, args.eps)
            soft.append({"player_id": pid, "lambda": sm.lam, "delta": sm.delta, "tau_f": sm.tau_f, "a_f": sm.a_f,
                         "tau_k": sm.tau_k, "a_k": sm.a_k, "sign_changes": sm.sign_changes})
        except ValueError as e:
            log.warning("%s softmax: %s", pid, e)
        drow, lrow = {"player_id": pid}, {"player_id": pid}
        for t in args.t_grid:
            key = f"t={t:g}"
            try:
                c = curvature_t_fit(s, t, args.eps)
            except ValueError as e:
                log.warning("%s t=%g: %s", pid, t, e)
                c = None
            drow[key] = c.delta if c and c.solved else "n.a."
            lrow[key] = c.lam if c and c.solved else "n.a."
        delta_grid.append(drow)
        lam_grid.append(lrow)
        try:
            d = double_fault_fit(s, args.eps)
            pairs[pid] = (d, s)
            dfault.append({"player_id": pid, "gamma": d.gamma, "lambda": d.lam, "a": d.a, "tau": d.tau})
        except ValueError as e:
            log.warning("%s double fault: %s", pid, e)

    fmt = args.format
    write_table(out, "softmax", ("player_id", "lambda", "delta", "tau_f", "a_f", "tau_k", "a_k", "sign_changes"),
                soft, fmt)
    t_cols = ("player_id",) + tuple(f"t={t:g}" for t in args.t_grid)
    write_table(out, "t_grid_delta", t_cols, delta_grid, fmt)
    write_table(out, "t_grid_lambda", t_cols, lam_grid, fmt)
    write_table(out, "double_fault", ("player_id", "gamma", "lambda", "a", "tau"), dfault, fmt)
    try:
        diag = gamma_diagnostic(pairs, args.span, args.replications, args.seed)
        write_table(out, "gamma_diagnostic", ("player_id", "serve", "estimate", "lo", "hi", "significant"),
                    [asdict(d) for d in diag], fmt)
    except TooFewPoints as e:
        log.warning("gamma diagnostic skipped: %s", e)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    data = load_dataset(args.input)
    cfg = BootstrapConfig(args.replications, args.level, args.seed)
    rows = []
    for pid in sorted(data.counts):
        try:
            cis = structural_ci(data.counts[pid], cfg, stats=data.stats.get(pid))
        except (FitError, TooManyFailures, ValueError) as e:
            log.warning("%s: %s", pid, e)
            continue
        for ci in cis:
            rows.append({"player_id": pid, **asdict(ci)})
    write_table(Path(args.out), "ci", CI_COLUMNS, rows, args.format)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _t_grid(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad t grid {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("t values must be positive")
    return vals


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="servesalience", description="Serve-strategy structural estimation toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, ladder=False):
        sp.add_argument("--input", help="counts or stats CSV (default: bundled 12-player table)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--eps", type=_positive(float), default=DEFAULT_EPS)
        if ladder:
            sp.add_argument("--prizes", help="prize ladder JSON (default: 2025 US Open men's singles)")
            sp.add_argument("--best-of", type=int, choices=(3, 5), default=5)

    sp = sub.add_parser("ingest", help="points CSV -> counts CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", default=".")
    sp.add_argument("--min-matches", type=_positive(int), default=20)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("estimate", help="structural fits, bounds and plot series")
    common(sp)
    sp.add_argument("--ratio-threshold", type=float, default=bd.DEFAULT_RATIO_THRESHOLD)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("bounds", help="model-free salience bounds")
    common(sp)
    sp.add_argument("--ratio-threshold", type=float, default=bd.DEFAULT_RATIO_THRESHOLD)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("counterfactual", help="gains from point-maximizing serves")
    common(sp, ladder=True)
    sp.set_defaults(func=cmd_counterfactual)

    sp = sub.add_parser("robustness", help="softmax, t grid, double-fault model and diagnostic")
    common(sp)
    sp.add_argument("--t-grid", type=_t_grid, default=DEFAULT_T_GRID)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replications", type=_positive(int), default=300)
    sp.add_argument("--span", type=_positive(float), default=0.5)
    sp.set_defaults(func=cmd_robustness)

    sp = sub.add_parser("bootstrap", help="parametric bootstrap intervals")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replications", type=_positive(int), default=300)
    sp.add_argument("--level", type=float, default=0.95)
    sp.set_defaults(func=cmd_bootstrap)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "span", 1.0) > 1.0:
        print("error: --span must lie in (0, 1]", file=sys.stderr)
        return EXIT_CONFIG
    if hasattr(args, "level") and not (0.0 < args.level < 1.0):
        print("error: --level must lie in (0, 1)", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
