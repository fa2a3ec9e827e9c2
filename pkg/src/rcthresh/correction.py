"""Correction tables: data model, lookup of the bias factor, CSV/JSON persistence.

A table holds, for each stirrer count ``n`` and each tabulated threshold,
the mean of the counting estimator, the correction factor
``e_thr / e_est_mean`` and the relative spread of the estimator. Lookups
interpolate piecewise-linearly against the ``e_est_mean`` column.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptTableError, DomainError, OutOfRangeLowError

FORMAT_VERSION = 1
ALL_EXCLUDED = "all_excluded"
COLUMNS = ("n", "e_thr", "p_level", "e_est_mean", "corr_factor", "rel_std", "p_all_below", "p_all_above", "flags")
_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class TableMeta:
    kind: str
    k_db: float
    method: str
    trials: int
    seed: int
    quantile_lo: float
    quantile_hi: float
    grid_points: int
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True)
class TableRow:
    """One grid point. Estimator columns are ``None`` on ``all_excluded`` rows."""

    n: int
    e_thr: float
    p_level: float
    e_est_mean: float | None
    corr_factor: float | None
    rel_std: float | None
    p_all_below: float
    p_all_above: float
    flags: frozenset = field(default_factory=frozenset)

    @property
    def excluded(self) -> bool:
        return ALL_EXCLUDED in self.flags


@dataclass(frozen=True)
class CorrectionTable:
    meta: TableMeta
    rows: tuple[TableRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        validate_rows(self.rows)

    @property
    def n_values(self) -> list[int]:
        return sorted({r.n for r in self.rows})

    def rows_for(self, n: int) -> list[TableRow]:
        return [r for r in self.rows if r.n == n]


@dataclass(frozen=True)
class CorrectionLookup:
    e_factor: float
    rel_std: float
    clamped: bool
    n_matched: bool


def validate_rows(rows) -> None:
    """Raise :class:`CorruptTableError` naming the first row that breaks an invariant."""
    prev = None
    last_mean = {}
    for i, r in enumerate(rows):
        if r.n < 2:
            raise CorruptTableError(f"row {i}: n = {r.n} is below 2")
        if prev is not None:
            if r.n < prev.n:
                raise CorruptTableError(f"row {i}: rows are not sorted by n")
            if r.n == prev.n and not r.e_thr > prev.e_thr:
                raise CorruptTableError(f"row {i}: e_thr is not strictly increasing within n = {r.n}")
        prev = r
        if r.excluded:
            continue
        if r.e_est_mean is None or r.corr_factor is None or r.rel_std is None:
            raise CorruptTableError(f"row {i}: missing estimator columns on an unflagged row")
        if not r.e_est_mean > 0:
            raise CorruptTableError(f"row {i}: e_est_mean must be positive")
        if abs(r.corr_factor - r.e_thr / r.e_est_mean) > _RATIO_TOL * max(1.0, abs(r.corr_factor)):
            raise CorruptTableError(f"row {i}: corr_factor != e_thr / e_est_mean")
        if r.n in last_mean and not r.e_est_mean > last_mean[r.n]:
            raise CorruptTableError(f"row {i}: e_est_mean is not strictly increasing within n = {r.n}")
        last_mean[r.n] = r.e_est_mean


def lookup_correction(table: CorrectionTable, n: int, e_est: float) -> CorrectionLookup:
    """Correction factor and relative uncertainty for a biased estimate ``e_est``.

    Estimates above the largest tabulated mean are clamped to the last row
    (``clamped=True``). A stirrer count missing from the table returns
    ``n_matched=False`` with NaN values so the caller can compute it exactly.
    """
    if not e_est > 0:
        raise DomainError("e_est must be positive")
    rows = [r for r in table.rows_for(n) if not r.excluded]
    if not rows:
        return CorrectionLookup(math.nan, math.nan, clamped=False, n_matched=False)
    means = np.array([r.e_est_mean for r in rows])
    factors = np.array([r.corr_factor for r in rows])
    spreads = np.array([r.rel_std for r in rows])
    if e_est < means[0]:
        raise OutOfRangeLowError(
            f"E_est = {e_est:.6g} is below the smallest tabulated mean estimate {means[0]:.6g} for N = {n}; "
            "the threshold is near or below the low edge of the grid: extend the grid or lower the input power"
        )
    if e_est > means[-1]:
        return CorrectionLookup(float(factors[-1]), float(spreads[-1]), clamped=True, n_matched=True)
    return CorrectionLookup(
        float(np.interp(e_est, means, factors)), float(np.interp(e_est, means, spreads)), clamped=False, n_matched=True
    )


# ---------------------------------------------------------------- persistence


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _header(meta: TableMeta) -> str:
    return (
        f"# rcthresh-table v{meta.format_version}; kind={meta.kind}; k_db={_fmt(meta.k_db)}; "
        f"method={meta.method}; trials={meta.trials}; seed={meta.seed}; "
        f"qlo={_fmt(meta.quantile_lo)}; qhi={_fmt(meta.quantile_hi)}; grid={meta.grid_points}"
    )


def to_csv(table: CorrectionTable) -> str:
    buf = io.StringIO()
    buf.write(_header(table.meta) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in table.rows:
        w.writerow(
            [
                _fmt(r.n),
                _fmt(r.e_thr),
                _fmt(r.p_level),
                _fmt(r.e_est_mean),
                _fmt(r.corr_factor),
                _fmt(r.rel_std),
                _fmt(r.p_all_below),
                _fmt(r.p_all_above),
                ";".join(sorted(r.flags)),
            ]
        )
    return buf.getvalue()


def _parse_header(line: str) -> TableMeta:
    if not line.startswith("# rcthresh-table "):
        raise CorruptTableError("line 1: missing '# rcthresh-table' header")
    version, *pairs = [p.strip() for p in line[len("# rcthresh-table ") :].split(";")]
    if version != f"v{FORMAT_VERSION}":
        raise CorruptTableError(f"line 1: unsupported format version {version!r}")
    try:
        kv = dict(p.split("=", 1) for p in pairs)
        return TableMeta(
            kind=kv["kind"],
            k_db=float(kv["k_db"]),
            method=kv["method"],
            trials=int(kv["trials"]),
            seed=int(kv["seed"]),
            quantile_lo=float(kv["qlo"]),
            quantile_hi=float(kv["qhi"]),
            grid_points=int(kv["grid"]),
        )
    except (KeyError, ValueError) as exc:
        raise CorruptTableError(f"line 1: malformed header ({exc})") from None


def _opt_float(s: str):
    return None if s == "" else float(s)


def _flags(s: str) -> frozenset:
    flags = frozenset(f for f in s.split(";") if f)
    unknown = flags - {ALL_EXCLUDED}
    if unknown:
        raise ValueError(f"unknown flags {sorted(unknown)}")
    return flags


def from_csv(text: str) -> CorrectionTable:
    lines = text.splitlines()
    if not lines:
        raise CorruptTableError("empty table file")
    meta = _parse_header(lines[0])
    reader = csv.reader(lines[1:])
    if tuple(next(reader, ())) != COLUMNS:
        raise CorruptTableError("line 2: unexpected column header")
    rows = []
    for i, rec in enumerate(reader):
        if len(rec) != len(COLUMNS):
            raise CorruptTableError(f"row {i}: expected {len(COLUMNS)} fields, got {len(rec)}")
        try:
            rows.append(
                TableRow(
                    n=int(rec[0]),
                    e_thr=float(rec[1]),
                    p_level=float(rec[2]),
                    e_est_mean=_opt_float(rec[3]),
                    corr_factor=_opt_float(rec[4]),
                    rel_std=_opt_float(rec[5]),
                    p_all_below=float(rec[6]),
                    p_all_above=float(rec[7]),
                    flags=_flags(rec[8]),
                )
            )
        except ValueError as exc:
            raise CorruptTableError(f"row {i}: {exc}") from None
    return CorrectionTable(meta, rows)


def to_json(table: CorrectionTable) -> str:
    meta = asdict(table.meta)
    meta["k_db"] = _fmt(meta["k_db"])
    rows = [{**asdict(r), "flags": sorted(r.flags)} for r in table.rows]
    return json.dumps({"meta": meta, "rows": rows}, indent=1) + "\n"


def from_json(text: str) -> CorrectionTable:
    try:
        doc = json.loads(text)
        meta = dict(doc["meta"])
        version = meta.get("format_version")
        if version != FORMAT_VERSION:
            raise CorruptTableError(f"unsupported format version {version!r}")
        meta["k_db"] = float(meta["k_db"])
        meta = TableMeta(**meta)
        raw = doc["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CorruptTableError):
            raise
        raise CorruptTableError(f"malformed JSON table ({exc})") from None
    rows = []
    for i, r in enumerate(raw):
        try:
            rows.append(TableRow(**{**r, "flags": _flags(";".join(r.get("flags", [])))}))
        except (TypeError, ValueError) as exc:
            raise CorruptTableError(f"row {i}: {exc}") from None
    return CorrectionTable(meta, rows)


def _is_json(path: Path) -> bool:
    return path.suffix.lower() == ".json"


def save_table(table: CorrectionTable, path) -> None:
    """Write ``table`` atomically; ``.json`` files get JSON, anything else CSV."""
    path = Path(path)
    text = to_json(table) if _is_json(path) else to_csv(table)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> CorrectionTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return from_json(text) if _is_json(path) else from_csv(text)
