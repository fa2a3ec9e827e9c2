"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error (all pass, all fail,
degenerate N, lookup out of range), 3 I/O or corrupt-table error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .correction import CorruptTableError, load_table, save_table
from .distributions import Kind, cdf, pdf, quantile, rayleigh, spec_for, unit_mean_spec
from .errors import DomainError
from .estimator import (
    MeasurementRecord,
    estimate_threshold,
    expected_max_field,
    max_field_cdf,
    max_field_quantile,
)
from .montecarlo import DEFAULT_N_VALUES, McConfig, Method, build_correction_table, exclusion_probabilities

SEED_ENV = "RCTHRESH_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty N list")
    return values


def _qrange(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _dist_spec(args):
    dist = getattr(args, "dist", None)
    if dist == "rice":
        if args.k_db is None:
            raise UsageError("--dist rice requires --k-db")
        return unit_mean_spec(Kind.RICE, args.k_db)
    if dist == "rayleigh" and args.k_db is not None:
        raise UsageError("--k-db is only meaningful with --dist rice")
    return spec_for(args.k_db)


def _config(args, spec, n_values=None) -> McConfig:
    lo, hi = args.quantile_range
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        return McConfig(
            spec=spec,
            n_values=n_values or args.n,
            trials=args.trials,
            seed=seed,
            grid_points=args.grid,
            quantile_lo=lo,
            quantile_hi=hi,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _emit(out, fmt: str, values: dict, text_lines=None):
    if fmt == "json":
        out.write(json.dumps(values, indent=1) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(values.keys())
        w.writerow(_num(v) for v in values.values())
    else:
        for line in text_lines or [f"{k}: {_num(v)}" for k, v in values.items()]:
            out.write(line + "\n")


def _write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------- subcommands


def cmd_simulate(args, out):
    spec = _dist_spec(args)
    config = _config(args, spec)
    table = build_correction_table(config, args.method, workers=args.workers)
    save_table(table, args.out)
    flagged = sum(r.excluded for r in table.rows)
    out.write(
        f"wrote {len(table.rows)} rows ({spec.describe()}, method={table.meta.method}, "
        f"N={','.join(map(str, config.n_values))}, {flagged} flagged) to {args.out}\n"
    )


def cmd_estimate(args, out):
    record = MeasurementRecord(args.n, args.n_low, args.mean_field, args.k_db)
    table = load_table(args.table) if args.table else None
    est = estimate_threshold(record, table)
    fmt = "json" if args.json else args.format
    if fmt == "json":
        doc = {**asdict(est), "record": asdict(record)}
        out.write(json.dumps(doc, indent=1) + "\n")
        return
    if fmt == "csv":
        _emit(out, "csv", {**asdict(record), **asdict(est)})
        return
    spec = record.spec
    lines = [
        f"distribution: {spec.describe()}",
        f"N: {record.n}",
        f"N_low: {record.n_low}",
        f"biased estimate E_est (normalized): {_num(est.e_est_norm)}",
        f"correction factor e(N, E_est): {_num(est.e_factor)}",
        f"unbiased threshold E_thr (normalized): {_num(est.e_thr_norm)}",
        f"unbiased threshold (V/m): {_num(est.e_thr_abs)}",
        f"relative uncertainty: {_num(est.rel_std)} ({est.rel_std * 100:.2f} %)",
        f"clamped: {_num(est.clamped)}",
    ]
    if est.notes:
        lines.append(f"note: {est.notes}")
    _emit(out, "text", {}, lines)


def cmd_maxfield(args, out):
    if args.x is not None:
        values = {"n": args.n, "x": args.x, "max_field_cdf": max_field_cdf(args.n, args.x)}
    elif args.prob is not None:
        values = {"n": args.n, "prob": args.prob, "max_field_quantile": max_field_quantile(args.n, args.prob)}
    else:
        values = {"n": args.n, "expected_max_field": expected_max_field(args.n)}
    _emit(out, args.format, values)


def cmd_exclusion(args, out):
    spec = _dist_spec(args)
    below, above = exclusion_probabilities(args.n, args.threshold, spec)
    _emit(out, args.format, {"n": args.n, "threshold": args.threshold, "p_all_below": below, "p_all_above": above})


def _plot_rows(args):
    fig = args.figure
    if fig in (1, 4):
        if fig == 1:
            if args.k_db is not None:
                raise UsageError("figure 1 is the Rayleigh distribution; drop --k-db")
            spec = rayleigh()
        else:
            if args.k_db is None:
                raise UsageError("figure 4 needs --k-db")
            spec = unit_mean_spec(Kind.RICE, args.k_db)
        x = np.linspace(0.0, args.x_max, args.points)
        return spec, ("x", "pdf", "cdf"), zip(x, pdf(spec, x), cdf(spec, x))
    if fig == 3 and args.k_db is not None:
        raise UsageError("figure 3 is the Rayleigh case; use --figure 5 with --k-db")
    if fig == 5 and args.k_db is None:
        raise UsageError("figure 5 needs --k-db")
    spec = spec_for(args.k_db)
    config = _config(args, spec)
    if fig in (3, 5):
        table = build_correction_table(config, args.method, workers=args.workers)
        rows = [(r.n, r.e_est_mean, r.corr_factor, r.rel_std) for r in table.rows if not r.excluded]
        return spec, ("n", "e_est_mean", "corr_factor", "rel_std"), rows
    # figure 6
    if Method(args.method) is Method.ORACLE:
        e_grid = quantile(spec, config.p_grid())
        rows = [(n, e, *exclusion_probabilities(n, float(e), spec)) for n in config.n_values for e in e_grid]
    else:
        table = build_correction_table(config, args.method, workers=args.workers)
        rows = [(r.n, r.e_thr, r.p_all_below, r.p_all_above) for r in table.rows]
    return spec, ("n", "e_thr", "p_all_below", "p_all_above"), rows


def cmd_plotdata(args, out):
    spec, columns, rows = _plot_rows(args)
    buf = io.StringIO()
    header = f"# rcthresh-plot figure={args.figure}"
    if spec.kind is Kind.RICE:
        header += f"; k_db={_num(spec.k_db)}"
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    count = 0
    for row in rows:
        w.writerow(_num(v) for v in row)
        count += 1
    _write_text(Path(args.out), buf.getvalue())
    out.write(f"wrote {count} points for figure {args.figure} to {args.out}\n")


# ---------------------------------------------------------------- parser


def _add_grid_options(p, with_dist=True):
    if with_dist:
        p.add_argument("--dist", choices=["rayleigh", "rice"], default=None)
    p.add_argument("--grid", type=int, default=50, help="number of grid points in probability (default 50)")
    p.add_argument("--quantile-range", type=_qrange, default=(0.01, 0.99), metavar="LO:HI")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.ORACLE.value)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rcthresh", description="Susceptibility threshold estimation in reverberation chambers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="build a correction table")
    p.add_argument("--k-db", type=float, default=None)
    p.add_argument("--n", type=_n_list, required=True, help="comma-separated stirrer counts")
    _add_grid_options(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the DUT threshold from pass/fail counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-low", type=int, required=True)
    p.add_argument("--mean-field", type=float, required=True, help="calibrated mean field, V/m")
    p.add_argument("--k-db", type=float, default=None)
    p.add_argument("--table", default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("maxfield", help="maximum-field statistics of an ideal chamber")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--x", type=float, default=None)
    g.add_argument("--prob", type=float, default=None)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_maxfield)

    p = sub.add_parser("exclusion", help="probability that all samples fall below / above a threshold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--dist", choices=["rayleigh", "rice"], default=None)
    p.add_argument("--k-db", type=float, default=None)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.set_defaults(func=cmd_exclusion)

    p = sub.add_parser("plotdata", help="export curve data as CSV")
    p.add_argument("--figure", type=int, choices=[1, 3, 4, 5, 6], required=True)
    p.add_argument("--k-db", type=float, default=None)
    p.add_argument("--n", type=_n_list, default=DEFAULT_N_VALUES)
    p.add_argument("--points", type=int, default=201, help="x samples for figures 1 and 4")
    p.add_argument("--x-max", type=float, default=4.0)
    _add_grid_options(p, with_dist=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.func(args, stdout)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except (CorruptTableError, OSError) as exc:
        stderr.write(f"i/o error: {exc}\n")
        return 3
    except DomainError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
