"""Exception types raised across the package."""


class StvsiError(Exception):
    """Base class for all package errors."""


class InputError(StvsiError, ValueError):
    """Input data or arguments violate a precondition."""


class MalformedCsv(InputError):
    pass


class NonUniformSampling(InputError):
    pass


class TooShort(InputError):
    pass


class InvalidTrajectory(InputError):
    pass


class WindowOutOfRange(InputError):
    pass


class InsufficientExtrema(InputError):
    pass


class GridMismatch(InputError):
    pass


class InvalidSpec(InputError):
    pass


class EmptyBatch(InputError):
    pass


class NoFaultDetected(StvsiError):
    """No sub-threshold dip followed by a recovery was found."""


class NoFeasibleGamma(StvsiError):
    """No sensitivity value in the search range brings the boundary pair within epsilon."""
