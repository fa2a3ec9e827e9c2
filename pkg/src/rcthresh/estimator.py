"""Threshold estimation from pass/fail counts, plus maximum-field utilities.

``estimate_threshold`` turns ``(N, N_low)`` into a biased normalized
estimate ``quantile(N_low / N)``, multiplies it by the tabulated correction
factor and scales by the calibrated chamber mean field.

The maximum-field helpers assume an ideal (unit-mean Rayleigh) chamber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .correction import CorrectionLookup, CorrectionTable, lookup_correction
from .distributions import RAYLEIGH_SIGMA, DistributionSpec, cdf, quantile, rayleigh, spec_for
from .errors import AllFailError, AllPassError, DegenerateError, DomainError
from .montecarlo import McConfig, Method, build_correction_table

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class MeasurementRecord:
    n: int
    n_low: int
    mean_field: float
    k_db: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("N must be >= 2")
        if not 0 <= self.n_low <= self.n:
            raise DomainError("N_low must lie in [0, N]")
        if not (self.mean_field > 0 and math.isfinite(self.mean_field)):
            raise DomainError("mean_field must be a positive finite value")

    @property
    def spec(self) -> DistributionSpec:
        return spec_for(self.k_db)


@dataclass(frozen=True)
class ThresholdEstimate:
    e_est_norm: float
    e_factor: float
    e_thr_norm: float
    e_thr_abs: float
    rel_std: float
    clamped: bool
    notes: str = ""


@lru_cache(maxsize=64)
def oracle_table(spec: DistributionSpec, n: int) -> CorrectionTable:
    """Exact correction table for one ``n`` on the default 1%..99% grid."""
    return build_correction_table(McConfig(spec=spec, n_values=(n,)), Method.ORACLE)


def estimate_threshold(record: MeasurementRecord, table: CorrectionTable | None = None) -> ThresholdEstimate:
    """Unbiased DUT threshold for a measurement record.

    The table is used when it contains ``record.n``; otherwise (or with no
    table) the correction is computed exactly on demand.
    """
    n, k = record.n, record.n_low
    if k == n:
        raise AllPassError(n)
    if k == 0:
        raise AllFailError(n)
    if n == 2:
        raise DegenerateError(
            "N = 2 leaves a single admissible outcome (N_low = 1), which carries no threshold "
            "information; increase N"
        )
    spec = record.spec
    e_est = quantile(spec, k / n)
    notes = []
    look: CorrectionLookup | None = None
    if table is not None:
        if table.meta.kind != spec.kind.value or table.meta.k_db != spec.k_db:
            raise DomainError(
                f"table is for kind={table.meta.kind}, k_db={table.meta.k_db:g}, "
                f"but the record is {spec.describe()}"
            )
        look = lookup_correction(table, n, e_est)
        if not look.n_matched:
            notes.append(f"N = {n} not in table; correction computed exactly")
            look = None
    if look is None:
        look = lookup_correction(oracle_table(spec, n), n, e_est)
    if look.clamped:
        notes.append(
            "estimate lies above the highest tabulated mean estimate; correction clamped to the "
            "99% grid edge, treat the threshold as a lower bound"
        )
    e_thr = e_est * look.e_factor
    return ThresholdEstimate(
        e_est_norm=e_est,
        e_factor=look.e_factor,
        e_thr_norm=e_thr,
        e_thr_abs=record.mean_field * e_thr,
        rel_std=look.rel_std,
        clamped=look.clamped,
        notes="; ".join(notes),
    )


def expected_max_field(n: int, euler_gamma: float = EULER_GAMMA) -> float:
    """Approximate expected maximum of ``n`` unit-mean Rayleigh samples."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return math.sqrt(4.0 / math.pi * (euler_gamma + math.log(n + 1) - 1.0 / (2 * (n + 1))))


def max_field_cdf(n: int, x: float) -> float:
    """CDF of the maximum of ``n`` independent unit-mean Rayleigh samples."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not x >= 0:
        raise DomainError("x must be >= 0")
    return cdf(rayleigh(), x) ** n


def max_field_quantile(n: int, p: float) -> float:
    """Inverse of :func:`max_field_cdf`."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0 <= p < 1:
        raise DomainError("need 0 <= p < 1")
    if p == 0:
        return 0.0
    return RAYLEIGH_SIGMA * math.sqrt(-2.0 * math.log1p(-(p ** (1.0 / n))))
