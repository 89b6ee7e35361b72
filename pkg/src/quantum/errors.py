from typing import Optional


class NaqcError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(NaqcError):
    """Shapes or subsystem dimensions do not fit together."""


class StateValidationError(NaqcError):
    """A matrix or table violates one of its structural invariants."""

    def __init__(self, invariant: str, detail: str, deviation: Optional[float] = None):
        self.invariant = invariant
        self.deviation = deviation
        super().__init__(f"{invariant}: {detail}")


class UnsupportedDimensionError(NaqcError):
    def __init__(self, dim: int, supported):
        self.dim = dim
        self.supported = tuple(supported)
        listed = ", ".join(str(d) for d in self.supported)
        super().__init__(f"dimension {dim} is not supported (supported: {listed})")


class FieldMismatchError(NaqcError):
    """Finite-field elements belong to different fields."""


class BoundNotEstablishedError(NaqcError):
    """The requested bound is not derived for this dimension and measure."""
