"""Exception types raised across the package."""


class BicrossError(Exception):
    """Base class for all package errors."""


class OrderCapExceeded(BicrossError):
    pass


class SpecError(BicrossError):
    """A group spec string could not be parsed."""


class FactorizationError(BicrossError):
    pass


class ShapeError(BicrossError):
    """Dimensions or label shapes do not match."""


class NotPermutation(BicrossError):
    pass


class MissingStar(BicrossError):
    pass


class NotFactorReversing(BicrossError):
    pass


class NotDecomposable(BicrossError):
    pass


class ModuleUnverified(BicrossError):
    pass


class ObstructionVacuous(BicrossError):
    """One factor is trivial, so the cocycle is trivially a coboundary."""
