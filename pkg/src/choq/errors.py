"""Exception types shared across the package."""


class ChoqError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ChoqError, ValueError):
    """A parameter is outside its admissible domain."""


class GeometryError(ChoqError, ValueError):
    """Requested geometry does not fit the grid (ball outside root, bad radius, ...)."""


class SchemaError(ChoqError, ValueError):
    """Malformed serialized grid data."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"field '{field}': {message}")
        self.field = field


class InstanceTooLargeError(ChoqError, ValueError):
    """An exhaustive oracle was asked to enumerate an infeasibly large instance."""
