"""Exception types raised by the metric core."""


class GenMetricsError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(GenMetricsError, ValueError):
    """Array has the wrong rank, length, or incompatible dimensions."""


class InvalidData(GenMetricsError, ValueError):
    """Input contains non-finite entries or otherwise unusable values."""


class InsufficientSample(GenMetricsError, ValueError):
    """Too few rows for the requested statistic."""


class NumericalError(GenMetricsError, ArithmeticError):
    """A numerical routine failed to converge or produced an invalid result."""


class NotPSD(NumericalError):
    """Matrix has an eigenvalue below the positive-semidefinite tolerance."""


class SingularCovariance(NumericalError):
    """Sample covariance is not invertible, even after jitter."""


class InvalidLambda(GenMetricsError, ValueError):
    """Mixture displacement exceeds the covariance-matching bound."""


class NotNpy(GenMetricsError, ValueError):
    """File is not a readable NPY v1.0 container."""


class UnsupportedLayout(GenMetricsError, ValueError):
    """NPY file uses Fortran (column-major) layout."""


class UnsupportedDtype(GenMetricsError, ValueError):
    """NPY dtype is not one of the accepted little-endian float types."""
