"""Monte-Carlo simulation of the pass/fail counting estimator and its exact oracle.

One Monte-Carlo trial draws ``n`` field samples, counts how many lie below
the threshold (``N_low``) and records ``quantile(N_low / n)``. Trials with
``N_low`` equal to 0 or ``n`` are excluded, since the estimate is then
undefined. Because ``N_low`` is exactly ``Binomial(n, F(e_thr))``, the same
statistics are also available as finite sums; :func:`oracle_point` computes
them and serves both as the default table generator and as the reference
the simulation is checked against.

Reproducibility
---------------
Trials are drawn in blocks of :data:`TRIAL_BLOCK` (fewer for large ``n``,
so a block never exceeds :data:`BLOCK_SAMPLES` fields); block ``b`` uses
the stream ``stream.child(b)``. Each block is reduced to an integer
histogram of ``N_low`` per threshold, and histograms are summed. Integer
sums do not depend on order, so results are bit-identical for any number
of worker processes. A sweep over several thresholds at one ``n`` counts
the same field draws against every threshold.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .correction import ALL_EXCLUDED, CorrectionTable, TableMeta, TableRow
from .distributions import DistributionSpec, RngStream, cdf, estimator_levels, quantile, rayleigh, sample_batch, sf
from .errors import AllExcludedError, DegenerateError, DomainError

TRIAL_BLOCK = 10_000
BLOCK_SAMPLES = 2_000_000
TABLE_CONTEXT = 1
DEFAULT_N_VALUES = (5, 10, 20, 50, 100, 200)


class Method(str, enum.Enum):
    MONTE_CARLO = "mc"
    ORACLE = "oracle"


@dataclass(frozen=True)
class McConfig:
    spec: DistributionSpec = field(default_factory=rayleigh)
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    trials: int = 100_000
    seed: int = 0
    grid_points: int = 50
    quantile_lo: float = 0.01
    quantile_hi: float = 0.99

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(sorted(int(n) for n in self.n_values)))
        if not self.n_values:
            raise DomainError("n_values is empty")
        if len(set(self.n_values)) != len(self.n_values):
            raise DomainError("n_values contains duplicates")
        if self.n_values[0] < 3:
            # N = 2 admits only N_low = 1: the estimator is constant and cannot be inverted
            raise DomainError("every N in a table must be >= 3")
        if self.trials < 1000:
            raise DomainError("trials must be >= 1000")
        if self.grid_points < 2:
            raise DomainError("grid_points must be >= 2")
        if not 0 < self.quantile_lo < self.quantile_hi < 1:
            raise DomainError("need 0 < quantile_lo < quantile_hi < 1")

    def p_grid(self) -> np.ndarray:
        return np.linspace(self.quantile_lo, self.quantile_hi, self.grid_points)


@dataclass(frozen=True)
class PointStats:
    n: int
    e_thr: float
    p_level: float
    e_est_mean: float
    e_est_std: float
    rel_std: float
    p_all_below: float
    p_all_above: float
    admissible_fraction: float
    method: Method
    trials_used: int


def _check_point(n, e_thr):
    if n < 2:
        raise DegenerateError(f"N = {n}: at least two stirrer positions are needed for an admissible count")
    if not e_thr > 0:
        raise DomainError("e_thr must be positive")


def exclusion_probabilities(n: int, e_thr: float, spec: DistributionSpec) -> tuple[float, float]:
    """Probabilities that all ``n`` samples fall below / above ``e_thr``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not e_thr >= 0:
        raise DomainError("e_thr must be >= 0")
    return cdf(spec, e_thr) ** n, sf(spec, e_thr) ** n


def oracle_point(n: int, e_thr: float, spec: DistributionSpec) -> PointStats:
    """Exact statistics of the admissible counting estimator at ``(n, e_thr)``."""
    _check_point(n, e_thr)
    p, q = cdf(spec, e_thr), sf(spec, e_thr)
    if p <= 0.0 or q <= 0.0:
        raise AllExcludedError(f"F(e_thr) = {p:.3g}: no admissible outcome at N = {n}")
    k = np.arange(1, n)
    logw = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + k * math.log(p) + (n - k) * math.log(q)
    top = logw.max()
    w = np.exp(logw - top)
    total = w.sum()
    levels = estimator_levels(spec, n)[1:]
    mean = float(w @ levels / total)
    std = float(math.sqrt(max(w @ (levels - mean) ** 2 / total, 0.0)))
    return PointStats(
        n=n,
        e_thr=float(e_thr),
        p_level=p,
        e_est_mean=mean,
        e_est_std=std,
        rel_std=std / mean,
        p_all_below=p**n,
        p_all_above=q**n,
        admissible_fraction=float(min(math.exp(top) * total, 1.0)),
        method=Method.ORACLE,
        trials_used=0,
    )


def count_histograms(n: int, thresholds, spec: DistributionSpec, trials: int, stream: RngStream) -> np.ndarray:
    """Simulate ``trials`` runs of ``n`` stirrer positions.

    Returns an integer array ``h`` of shape ``(len(thresholds), n + 1)``
    where ``h[j, k]`` is the number of trials with exactly ``k`` samples
    below ``thresholds[j]``. Thresholds must be sorted ascending.
    """
    thr = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thr) < 0):
        raise DomainError("thresholds must be sorted")
    g = thr.size
    hist = np.zeros(g * (n + 1), dtype=np.int64)
    offsets = np.arange(g) * (n + 1)
    block = max(1, min(TRIAL_BLOCK, BLOCK_SAMPLES // n))
    for b, start in enumerate(range(0, trials, block)):
        bt = min(block, trials - start)
        x = sample_batch(spec, bt * n, stream.child(b)).reshape(bt, n)
        # bin = number of thresholds <= sample; the sample is "low" for every threshold index >= bin
        bins = np.searchsorted(thr, x, side="right")
        per_trial = np.bincount((np.arange(bt)[:, None] * (g + 1) + bins).ravel(), minlength=bt * (g + 1))
        n_low = np.cumsum(per_trial.reshape(bt, g + 1), axis=1)[:, :g]
        hist += np.bincount((n_low + offsets).ravel(), minlength=g * (n + 1))
    return hist.reshape(g, n + 1)


def stats_from_histogram(n: int, e_thr: float, spec: DistributionSpec, hist: np.ndarray) -> PointStats:
    """Reduce one row of :func:`count_histograms` to :class:`PointStats`."""
    hist = np.asarray(hist)
    trials = int(hist.sum())
    counts = hist[1:n].astype(float)
    used = counts.sum()
    if used == 0:
        raise AllExcludedError(
            f"all {trials} trials at N = {n}, e_thr = {e_thr:.6g} had every sample on one side of the threshold"
        )
    levels = estimator_levels(spec, n)[1:]
    mean = float(counts @ levels / used)
    var = float(counts @ (levels - mean) ** 2 / (used - 1)) if used > 1 else 0.0
    std = math.sqrt(var)
    return PointStats(
        n=n,
        e_thr=float(e_thr),
        p_level=cdf(spec, e_thr),
        e_est_mean=mean,
        e_est_std=std,
        rel_std=std / mean,
        p_all_below=float(hist[n] / trials),
        p_all_above=float(hist[0] / trials),
        admissible_fraction=float(used / trials),
        method=Method.MONTE_CARLO,
        trials_used=trials,
    )


def simulate_point(n: int, e_thr: float, spec: DistributionSpec, trials: int, stream: RngStream) -> PointStats:
    """Monte-Carlo statistics of the counting estimator at one ``(n, e_thr)``."""
    _check_point(n, e_thr)
    if trials < 1000:
        raise DomainError("trials must be >= 1000")
    hist = count_histograms(n, [e_thr], spec, trials, stream)[0]
    return stats_from_histogram(n, e_thr, spec, hist)


def _row(n, e_thr, p_level, stats=None, excluded=None) -> TableRow:
    if stats is None:
        below, above = excluded
        return TableRow(n, e_thr, p_level, None, None, None, below, above, frozenset({ALL_EXCLUDED}))
    return TableRow(
        n=n,
        e_thr=e_thr,
        p_level=p_level,
        e_est_mean=stats.e_est_mean,
        corr_factor=e_thr / stats.e_est_mean,
        rel_std=stats.rel_std,
        p_all_below=float(stats.p_all_below),
        p_all_above=float(stats.p_all_above),
    )


def _rows_for_n(args) -> list[TableRow]:
    config, method, n_index = args
    n = config.n_values[n_index]
    p_grid = config.p_grid()
    e_grid = np.asarray(quantile(config.spec, p_grid))
    rows = []
    if method is Method.ORACLE:
        for p, e in zip(p_grid, e_grid):
            try:
                rows.append(_row(n, float(e), float(p), oracle_point(n, float(e), config.spec)))
            except AllExcludedError:
                rows.append(_row(n, float(e), float(p), excluded=exclusion_probabilities(n, float(e), config.spec)))
        return rows
    stream = RngStream(config.seed, (TABLE_CONTEXT, n_index))
    hist = count_histograms(n, e_grid, config.spec, config.trials, stream)
    for p, e, h in zip(p_grid, e_grid, hist):
        try:
            rows.append(_row(n, float(e), float(p), stats_from_histogram(n, float(e), config.spec, h)))
        except AllExcludedError:
            rows.append(_row(n, float(e), float(p), excluded=(float(h[n] / h.sum()), float(h[0] / h.sum()))))
    return rows


def build_correction_table(config: McConfig, method: Method | str = Method.ORACLE, workers: int = 1) -> CorrectionTable:
    """Tabulate estimator mean, correction factor and spread over ``n_values`` x the quantile grid.

    Points where every trial is excluded become rows flagged ``all_excluded``.
    ``workers > 1`` spreads the ``n`` values over processes; the result is
    identical to the serial one.
    """
    method = Method(method)
    jobs = [(config, method, i) for i in range(len(config.n_values))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_rows_for_n, jobs))
    else:
        parts = [_rows_for_n(j) for j in jobs]
    meta = TableMeta(
        kind=config.spec.kind.value,
        k_db=config.spec.k_db,
        method=method.value,
        trials=config.trials,
        seed=config.seed,
        quantile_lo=config.quantile_lo,
        quantile_hi=config.quantile_hi,
        grid_points=config.grid_points,
    )
    return CorrectionTable(meta, [r for part in parts for r in part])
