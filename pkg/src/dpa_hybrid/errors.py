"""Exception types raised across the package."""


class DpaError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(DpaError, ValueError):
    pass


class DomainError(DpaError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class StructureError(DpaError, ValueError):
    """An RF matrix does not have the block-diagonal unit-modulus layout."""


class DegenerateChannelError(DpaError, ValueError):
    pass


class DegenerateProjectionError(DpaError, ArithmeticError):
    """Sphere projection of the zero vector was requested.

    Recoverable: perturb the dual variable and retry the step.
    """


class ContractError(DpaError, ValueError):
    pass


class ConfigError(DpaError, ValueError):
    pass
