"""Exception types shared across the package."""


class LatinError(ValueError):
    """Base class for all domain errors."""


class ValidationError(LatinError):
    """A grid or entry set violates the Latin-square constraints.

    ``kind`` is one of ``duplicate-in-row``, ``duplicate-in-column``,
    ``out-of-range``, ``conflict``, ``shape``; ``cell`` is the first
    offending 1-based ``(row, col)`` position when known.
    """

    def __init__(self, kind: str, message: str, cell=None):
        super().__init__(message)
        self.kind = kind
        self.cell = cell


class OrderTooLargeError(LatinError):
    """An exhaustive routine was asked for an order beyond its guard."""


class InstanceTooLargeError(LatinError):
    """An exact search exceeded its node budget (greedy fallback applies)."""


class InvariantBreachError(LatinError):
    """Input data violates an identity that valid data cannot violate."""
