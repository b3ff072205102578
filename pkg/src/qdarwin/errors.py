"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument: unknown label, out-of-range parameter, malformed state."""


class CapacityError(RuntimeError):
    """The requested object is too large for a dense representation."""
