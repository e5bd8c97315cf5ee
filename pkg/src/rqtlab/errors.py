"""Exception types shared across the package."""


class SingularEnergyError(ValueError):
    """E - V(x) vanishes where a kinetic quantity needs to divide by it."""


class DegenerateBasisError(ValueError):
    """The two basis solutions cease to be independent (turning energy)."""


class DomainError(ValueError):
    """An evaluation point or finite-difference stencil leaves the valid domain."""


class IntegrationOverflowError(RuntimeError):
    """Numeric integration produced a non-finite value."""

    def __init__(self, message: str, x: float | None = None):
        super().__init__(message)
        self.x = x
