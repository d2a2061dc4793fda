"""Exception types shared across the package."""


class EntrankError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(EntrankError, ValueError):
    """Bad input: sequence alphabet, parameter ranges, malformed files."""


class ContextMismatchError(ValidationError):
    """An observation and a distribution were built under different (T, n, N)."""


class ResourceGuardError(EntrankError, RuntimeError):
    """A requested exact computation exceeds the configured size cap."""
