"""Exception types shared across the package."""


class VerlindeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(VerlindeError, ValueError):
    """Arguments violate a documented precondition."""


class FusionDatumError(InvalidInputError):
    """Fusion data violates a structural axiom."""


class UnsupportedProductError(VerlindeError):
    """A divisor product falls outside the implemented calculus."""
