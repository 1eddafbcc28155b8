"""Exception types shared across the package."""

from __future__ import annotations


class OSTError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(OSTError, ValueError):
    """Operands belong to different groups G_{m,n}."""


class CapacityError(OSTError):
    """Group is too large for the dense exact engine."""

    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(
            f"group order {order:,} exceeds the exact-engine cap of {cap:,} elements"
        )


class NotConvergedError(OSTError):
    """A distance curve never dropped below the requested threshold."""

    def __init__(self, eps: float, max_t: int, last_distance: float):
        self.eps = eps
        self.max_t = max_t
        self.last_distance = last_distance
        super().__init__(
            f"distance still {last_distance:.6g} >= {eps} after {max_t} steps"
        )
