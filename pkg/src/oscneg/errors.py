"""Exception hierarchy shared by all modules."""


class OscnegError(Exception):
    """Base class for every error raised by this package."""

    kind = "error"


class GeometryError(OscnegError, ValueError):
    kind = "invalid-geometry"


class RegionError(OscnegError, ValueError):
    kind = "invalid-region"


class NotPositiveDefiniteError(OscnegError, ValueError):
    kind = "not-positive-definite"


class NumericalDegeneracyError(OscnegError, ArithmeticError):
    kind = "numerical-degeneracy"


class CrossCheckError(OscnegError, AssertionError):
    kind = "cross-check-failure"


class UnavailableConstantError(OscnegError, ValueError):
    kind = "unavailable-constant"


class DivergenceError(OscnegError, ValueError):
    kind = "divergence"


class CountOverflowError(OscnegError, OverflowError):
    kind = "overflow"


class InsufficientTruncationError(OscnegError):
    """Certified tail bound exceeds the admissible budget."""

    kind = "insufficient-truncation"

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class EnumerationTooLargeError(OscnegError):
    kind = "enumeration-too-large"


class TruncationLeakError(OscnegError):
    kind = "truncation-leak"


class ConfigError(OscnegError, ValueError):
    kind = "config-invalid"
