"""Exception hierarchy shared by every module of the package."""


class FhnError(Exception):
    """Base class for all errors raised by fhngreen."""


class DomainError(FhnError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class RegimeError(FhnError, ValueError):
    """Parameters fall outside the regime where the a priori bounds hold."""


class ToleranceError(FhnError, ArithmeticError):
    """Quadrature could not reach the requested tolerance.

    ``best`` carries the last estimate and ``error`` its estimated
    absolute error, so callers may still use it.
    """

    def __init__(self, message, best=None, error=None):
        super().__init__(message)
        self.best = best
        self.error = error


class TruncationError(FhnError, ArithmeticError):
    """A series could not be truncated within the allowed number of terms."""


class ConvergenceError(FhnError, ArithmeticError):
    """Picard iteration exhausted ``max_iter`` without meeting its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DivergenceError(FhnError, ArithmeticError):
    """An iterate or time step produced non-finite or runaway values."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(FhnError, ValueError):
    """Invalid run configuration: a value violates its constraint."""

    exit_code = 2


class ConfigFileError(ConfigError):
    """The configuration file is missing or unreadable."""

    exit_code = 4


class ConfigSyntaxError(ConfigError):
    """The configuration file is not well-formed JSON."""

    exit_code = 5


class StabilityError(ConfigError):
    """Finite-difference configuration violates the explicit stability limit."""
