"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A measure/config parameter is outside its valid range."""


class SizingError(ValueError):
    """A requested basis or matrix size exceeds what the platform supports."""


class OrderError(ValueError):
    """Not enough moments are available for the requested construction."""

    def __init__(self, message, required_order=None):
        super().__init__(message)
        self.required_order = required_order


class DimensionError(ValueError):
    """Ambient dimensions of two objects do not match."""


class UnsupportedError(ValueError):
    """The operation is not defined for the given input family."""
