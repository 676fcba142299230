"""Exception types shared across the package."""


class CapSelectError(Exception):
    """Base class for package errors."""


class ConfigError(CapSelectError, ValueError):
    """Invalid or inconsistent experiment configuration."""


class DataError(CapSelectError, ValueError):
    """Malformed input data (coefficient files, CSV fields)."""


class RuleMismatchError(CapSelectError, ValueError):
    """Discrete fields sampled on different quadrature rules were combined."""


class NumericalError(CapSelectError, ArithmeticError):
    """A linear solve or evaluation produced non-finite values."""
