"""Exception hierarchy shared by every bellscope module."""


class BellscopeError(ValueError):
    """Base class for all validation failures raised by bellscope."""


class ShapeError(BellscopeError):
    """Operands have incompatible dimensions."""


class SizingError(BellscopeError):
    """A construction would exceed the supported dimension cap."""


class HermiticityError(BellscopeError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class SpectrumError(BellscopeError):
    """An observable's spectrum violates its declared class."""


class RegimeViolationError(BellscopeError):
    """Operators do not satisfy the commutation pattern of the requested regime."""


class FalsificationError(RuntimeError):
    """A computed value exceeded a bound that theory says it cannot exceed."""
