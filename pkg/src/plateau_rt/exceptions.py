"""Exception types shared across the package."""


class CapacityError(ValueError):
    """Raised when an exact computation would exceed its enumeration cap."""
