"""Exception hierarchy shared by the library and the command line."""


class RcThreshError(Exception):
    """Base class for all errors raised by rcthresh."""


class DomainError(RcThreshError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateError(DomainError):
    """No admissible outcome exists (e.g. a single stirrer position)."""


class AllExcludedError(DomainError):
    """Every trial had all samples below or all above the threshold."""


class AllPassError(DomainError):
    """The DUT passed at every stirrer position."""

    def __init__(self, n: int):
        super().__init__(
            f"all {n} stirrer positions passed (N_low = N): the threshold is above every "
            "sampled field; tune the input power up or increase N and repeat the test"
        )


class AllFailError(DomainError):
    """The DUT failed at every stirrer position."""

    def __init__(self, n: int):
        super().__init__(
            f"all {n} stirrer positions failed (N_low = 0): the threshold is below every "
            "sampled field; lower the input power or increase N and repeat the test"
        )


class OutOfRangeLowError(DomainError):
    """Estimate below the smallest tabulated mean estimate."""


class CorruptTableError(RcThreshError, ValueError):
    """A correction table file is malformed or violates its invariants."""
