"""Exception hierarchy shared by the numerical modules."""


class GeoScatterError(Exception):
    """Base class for library errors."""


class DomainError(GeoScatterError, ValueError):
    """Argument outside the domain an operation accepts."""


class RangeError(GeoScatterError, OverflowError):
    """Result not representable in double precision."""


class ConvergenceError(GeoScatterError):
    """Quadrature tolerance not reached within the panel budget.

    The best available estimate is kept on ``result`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class EvaluationError(GeoScatterError):
    """An integrand returned NaN or inf at ``abscissa``."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class KinematicsError(GeoScatterError, ValueError):
    """Incident and scattered wave vectors do not describe elastic scattering."""


class SingularConfigurationError(GeoScatterError, ZeroDivisionError):
    """A ratio of amplitudes is undefined because the denominator vanishes."""
