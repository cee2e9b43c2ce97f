"""Exception taxonomy shared across the package.

Everything raised on purpose derives from ToapsError so callers can
catch the package's failures without swallowing genuine bugs.
"""


class ToapsError(Exception):
    """Base class for all errors raised by this package."""


class QuadratureFailure(ToapsError):
    """An integral could not be evaluated to the requested accuracy."""


class NotConverged(QuadratureFailure):
    """Adaptive subdivision hit its cap before meeting tolerance.

    Carries the best value so far, the error estimate, and the number
    of subdivisions spent, for callers that want to inspect or accept
    the partial result anyway.
    """

    def __init__(self, message, value=None, error_estimate=None, subdivisions_used=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.subdivisions_used = subdivisions_used


class InsufficientSupport(ToapsError):
    """Sampled data does not cover enough of a function's support."""


class DomainViolation(ToapsError):
    """An input lies outside the mathematical domain of the operation."""


class DivisionDegenerate(ToapsError):
    """A ratio was requested whose denominator is below the density floor."""


class ConfigError(ToapsError):
    """Unparsable or inconsistent run configuration."""
