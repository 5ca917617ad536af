"""Exception types shared across the package."""


class ClrnetError(Exception):
    """Base class for package errors."""


class ShapeError(ClrnetError, ValueError):
    """Operand shapes are incompatible with an operation's contract."""


class GradientError(ClrnetError, RuntimeError):
    """A gradient is missing or the graph cannot be differentiated."""


class ConfigError(ClrnetError, ValueError):
    """A configuration file or config object is invalid."""


class ValidationError(ClrnetError, ValueError):
    """A run-time validation failed (threat-model conditions, digests)."""


class CheckpointError(ClrnetError, IOError):
    """A checkpoint or container file is corrupt or unreadable."""


class DataError(ClrnetError, ValueError):
    """A dataset request violates the generator's preconditions."""
