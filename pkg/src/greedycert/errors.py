"""Exception types shared across the package."""


class GreedyCertError(Exception):
    """Base class for all library errors."""


class InvalidArgs(GreedyCertError, ValueError):
    """An argument violates a documented precondition."""


class CapExceeded(GreedyCertError):
    """A combinatorial enumeration would exceed its configured cap."""


class RankDeficient(GreedyCertError):
    """A sub-dictionary that must be full column rank is not."""


class TargetUnreachable(GreedyCertError):
    """The requested coherence target cannot be met for the given shape."""


class ZeroResidual(GreedyCertError):
    """Atom selection was asked for a numerically zero residual."""


class InvalidSeed(GreedyCertError, ValueError):
    """A seeded support is unusable (too large, duplicated, out of range)."""


class CalibrationFailed(GreedyCertError):
    """Scale calibration for a constructed input did not converge."""


class OutOfDomain(GreedyCertError, ValueError):
    """A closed-form bound was evaluated outside its validity region."""
