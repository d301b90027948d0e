"""Exception hierarchy shared by every pipeline stage."""


class BcgError(ValueError):
    """Base class for all errors raised by bcghr."""


class ValidationError(BcgError):
    """Input data violates a documented invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; ``location`` names the offending line or offset."""

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class ConfigError(BcgError):
    """A parameter or configuration value is out of its legal range."""


class RangeError(BcgError):
    """A frequency search range selects no spectral bins."""


class UndefinedCorrelationError(BcgError):
    """Pearson correlation requested on a series with zero variance."""
