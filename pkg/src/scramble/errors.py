"""Exception hierarchy shared by every scramble module."""


class ScrambleError(Exception):
    """Base class for all errors raised by this package."""


class LayoutError(ScrambleError, KeyError):
    """Unknown subsystem label or malformed layout."""

    def __str__(self):
        # KeyError quotes its message; keep it readable.
        return str(self.args[0]) if self.args else ""


class LabelCollisionError(LayoutError):
    pass


class DimensionError(ScrambleError, ValueError):
    pass


class ValidationError(ScrambleError, ValueError):
    """An object violates its mathematical invariants (hermiticity, trace, ...)."""


class PartitionError(ScrambleError, ValueError):
    """Label groups overlap or do not form the required partition."""


class ConfigurationError(ScrambleError, ValueError):
    pass


class RegistryError(ScrambleError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class MeasurementError(ScrambleError, ValueError):
    pass


class DomainError(ScrambleError, ValueError):
    pass
