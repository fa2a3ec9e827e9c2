"""Susceptibility threshold estimation for reverberation-chamber immunity tests.

Counting the stirrer positions at which a device passes gives a biased
estimate of its threshold field; this package supplies the exact and
Monte-Carlo bias corrections and uncertainties for Rayleigh and Rice
chambers.
"""

from .correction import (
    CorrectionLookup,
    CorrectionTable,
    TableMeta,
    TableRow,
    load_table,
    lookup_correction,
    save_table,
)
from .distributions import (
    DistributionSpec,
    Kind,
    RngStream,
    cdf,
    pdf,
    quantile,
    rayleigh,
    sample_batch,
    sf,
    spec_for,
    unit_mean_spec,
)
from .errors import (
    AllExcludedError,
    AllFailError,
    AllPassError,
    CorruptTableError,
    DegenerateError,
    DomainError,
    OutOfRangeLowError,
    RcThreshError,
)
from .estimator import (
    MeasurementRecord,
    ThresholdEstimate,
    estimate_threshold,
    expected_max_field,
    max_field_cdf,
    max_field_quantile,
)
from .montecarlo import (
    McConfig,
    Method,
    PointStats,
    build_correction_table,
    exclusion_probabilities,
    oracle_point,
    simulate_point,
)

__version__ = "0.1.0"
