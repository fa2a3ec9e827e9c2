"""Unit-mean Rayleigh and Rice field-magnitude distributions.

A :class:`DistributionSpec` holds the scale ``sigma``, the line-of-sight
amplitude ``nu`` and the K-factor in dB. The constructors in this module
always normalize the distribution to a mean field of 1, so a normalized
result is converted to V/m by multiplying with the calibrated chamber mean
field.

The Rayleigh CDF used throughout is ``1 - exp(-x^2 / (2 sigma^2))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .special import i0e, i1e, marcum_q1, marcum_q1_complement

RAYLEIGH_SIGMA = math.sqrt(2.0 / math.pi)


class Kind(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    RICE = "rice"


@dataclass(frozen=True)
class DistributionSpec:
    """Field-magnitude distribution. ``k_db`` is ``-inf`` for Rayleigh."""

    kind: Kind
    sigma: float
    nu: float = 0.0
    k_db: float = -math.inf

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not self.nu >= 0:
            raise DomainError(f"nu must be nonnegative, got {self.nu}")
        if self.kind is Kind.RAYLEIGH and self.nu != 0:
            raise DomainError("a Rayleigh distribution has nu = 0")

    @property
    def k_linear(self) -> float:
        return self.nu**2 / (2.0 * self.sigma**2)

    def mean(self) -> float:
        """Closed-form mean of the distribution."""
        if self.kind is Kind.RAYLEIGH:
            return self.sigma * math.sqrt(math.pi / 2.0)
        return self.sigma * _rice_mean_at_unit_sigma(self.k_linear)

    def describe(self) -> str:
        if self.kind is Kind.RAYLEIGH:
            return "Rayleigh"
        return f"Rice (K = {self.k_db:g} dB)"


@dataclass(frozen=True)
class RngStream:
    """Seed plus a tuple of indices naming one independent random stream.

    The stream is a PCG64 generator seeded from ``SeedSequence(seed,
    spawn_key=stream_id)``, so a given ``(seed, stream_id)`` reproduces the
    same numbers regardless of which process draws them or in what order.
    """

    seed: int
    stream_id: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "stream_id", tuple(int(i) for i in self.stream_id))

    def child(self, *index: int) -> RngStream:
        return RngStream(self.seed, self.stream_id + tuple(index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.PCG64(ss))


def _rice_mean_at_unit_sigma(k: float) -> float:
    # sigma*sqrt(pi/2)*exp(-K/2)*[(1+K) I0(K/2) + K I1(K/2)] with sigma = 1
    h = 0.5 * k
    return math.sqrt(math.pi / 2.0) * ((1.0 + k) * i0e(h) + k * i1e(h))


def rayleigh() -> DistributionSpec:
    return DistributionSpec(Kind.RAYLEIGH, RAYLEIGH_SIGMA)


def unit_mean_spec(kind: Kind | str, k_db: float | None = None) -> DistributionSpec:
    """Build a unit-mean distribution.

    ``kind="rice"`` requires a K-factor in dB. ``k_db = -inf`` is accepted as
    the K -> 0 sentinel and returns the exact Rayleigh distribution.
    """
    kind = Kind(kind)
    if kind is Kind.RAYLEIGH:
        if k_db is not None and k_db != -math.inf:
            raise DomainError("k_db is not defined for a Rayleigh distribution")
        return rayleigh()
    if k_db is None:
        raise DomainError("a Rice distribution needs a K-factor (k_db)")
    k_db = float(k_db)
    if k_db == -math.inf:
        return rayleigh()
    if not math.isfinite(k_db):
        raise DomainError(f"k_db must be finite, got {k_db}")
    k = 10.0 ** (k_db / 10.0)
    # the mean is linear in sigma at fixed K
    sigma = 1.0 / _rice_mean_at_unit_sigma(k)
    return DistributionSpec(Kind.RICE, sigma, sigma * math.sqrt(2.0 * k), k_db)


def spec_for(k_db: float | None) -> DistributionSpec:
    """Rayleigh when ``k_db`` is absent or ``-inf``, unit-mean Rice otherwise."""
    if k_db is None or k_db == -math.inf:
        return rayleigh()
    return unit_mean_spec(Kind.RICE, k_db)


def _check_field(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("field magnitude must be >= 0")
    return x


def _out(x, values):
    return float(values) if np.ndim(x) == 0 else values


def pdf(spec: DistributionSpec, x):
    """Probability density at field magnitude ``x``."""
    xa = _check_field(x)
    s2 = spec.sigma**2
    if spec.kind is Kind.RAYLEIGH or spec.nu == 0:
        val = xa / s2 * np.exp(-(xa**2) / (2.0 * s2))
    else:
        # exp(-(x^2+nu^2)/2s^2) I0(x nu/s^2) = exp(-(x-nu)^2/2s^2) i0e(x nu/s^2)
        val = xa / s2 * np.exp(-((xa - spec.nu) ** 2) / (2.0 * s2)) * i0e(xa * spec.nu / s2)
    return _out(x, val)


def cdf(spec: DistributionSpec, x):
    """Cumulative probability ``P(X <= x)``."""
    xa = _check_field(x)
    if spec.kind is Kind.RAYLEIGH or spec.nu == 0:
        val = -np.expm1(-(xa**2) / (2.0 * spec.sigma**2))
    else:
        val = marcum_q1_complement(spec.nu / spec.sigma, xa / spec.sigma)
    return _out(x, val)


def sf(spec: DistributionSpec, x):
    """Survival function ``P(X > x)``, accurate in the upper tail."""
    xa = _check_field(x)
    if spec.kind is Kind.RAYLEIGH or spec.nu == 0:
        val = np.exp(-(xa**2) / (2.0 * spec.sigma**2))
    else:
        val = marcum_q1(spec.nu / spec.sigma, xa / spec.sigma)
    return _out(x, val)


def _rice_quantile(spec: DistributionSpec, p: float) -> float:
    if p == 0.0:
        return 0.0
    hi = spec.nu + spec.sigma * math.sqrt(-2.0 * math.log1p(-p)) + 10.0 * spec.sigma
    return brentq(lambda v: cdf(spec, v) - p, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def quantile(spec: DistributionSpec, p):
    """Inverse CDF for ``0 <= p < 1``."""
    pa = np.asarray(p, dtype=float)
    if np.any(np.isnan(pa)) or np.any(pa < 0) or np.any(pa >= 1):
        raise DomainError("quantile needs 0 <= p < 1")
    if spec.kind is Kind.RAYLEIGH or spec.nu == 0:
        val = spec.sigma * np.sqrt(-2.0 * np.log1p(-pa))
    else:
        flat = [_rice_quantile(spec, float(v)) for v in pa.reshape(-1)]
        val = np.array(flat).reshape(pa.shape)
    return _out(p, val)


@lru_cache(maxsize=256)
def estimator_levels(spec: DistributionSpec, n: int) -> np.ndarray:
    """``quantile(spec, k/n)`` for ``k = 0..n-1``, the values the counting estimator can take."""
    out = quantile(spec, np.arange(n) / n)
    out.setflags(write=False)
    return out


def sample_batch(spec: DistributionSpec, n: int, stream: RngStream) -> np.ndarray:
    """Draw ``n`` field magnitudes from ``stream``.

    Rayleigh uses the inverse transform ``sigma*sqrt(-2 ln U)``, ``U`` in
    (0, 1]; Rice uses ``|nu + sigma*(Z1 + i Z2)|`` with standard normals.
    """
    if n < 1:
        raise DomainError("sample count must be >= 1")
    rng = stream.generator()
    if spec.kind is Kind.RAYLEIGH:
        u = 1.0 - rng.random(n)
        return spec.sigma * np.sqrt(-2.0 * np.log(u))
    z = rng.standard_normal((2, n))
    return np.hypot(spec.nu + spec.sigma * z[0], spec.sigma * z[1])
