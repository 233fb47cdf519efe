"""Exception types shared across the package."""


class PolysignError(Exception):
    """Base class for all package errors."""


class ValidationError(PolysignError):
    """A domain spec or configuration value is invalid."""


class DomainMismatchError(PolysignError):
    """Operands live on different grids or have inconsistent sizes."""


class CapabilityError(PolysignError):
    """The request is outside the supported parameter range."""


class AssemblyError(PolysignError):
    """Operator assembly or factorization failed."""


class NumericalError(PolysignError):
    """A numerical consistency check failed (residual, quadrature, symmetry)."""


class PositivityError(PolysignError):
    """A quantity that must be strictly positive is not."""


class SingularityError(PolysignError):
    """A kernel was evaluated at a singular point (x == y)."""


class DecompositionError(PolysignError):
    """A signed-decomposition invariant was violated.

    Carries the offending interior point and the values seen there.
    """

    def __init__(self, message, point=None, values=None):
        super().__init__(message)
        self.point = point
        self.values = values
