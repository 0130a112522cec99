"""Exception types shared across the library."""


class ThoulessLabError(Exception):
    """Base class for all library errors."""


class DomainError(ThoulessLabError, ValueError):
    """Input outside the domain of an operation (bad interval, extrapolation, ...)."""


class OffSpectrumError(DomainError):
    """Band-interior quantity requested off the spectrum or too close to a band edge."""


class BandEdgeError(OffSpectrumError):
    """Transfer-matrix eigendata requested within the band-edge exclusion zone."""


class DegeneratePivotError(ThoulessLabError, ArithmeticError):
    """The b-entry of the one-period transfer matrix degenerated inside a band."""


class SampleEigenvalueError(ThoulessLabError, ArithmeticError):
    """Green matrix evaluated at an eigenvalue of the decoupled sample."""


class SingularEnergyError(ThoulessLabError, ArithmeticError):
    """A resolvent denominator vanished beyond tolerance at the requested energy."""


class QuadratureError(ThoulessLabError, ArithmeticError):
    """Adaptive quadrature failed to converge. Carries the partial result."""

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class NumericalError(ThoulessLabError, ArithmeticError):
    """An invariant (range clamp, residual bound, positivity) was violated beyond tolerance."""


class ConfigError(ThoulessLabError, ValueError):
    """Malformed run configuration or input file."""
