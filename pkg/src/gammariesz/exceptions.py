"""Exception hierarchy shared by all modules."""


class GammaRieszError(Exception):
    """Base class for every error raised by this package."""


class GroupStructureError(GammaRieszError, ValueError):
    """Malformed group table, action, or mismatched group handles."""


class InvalidActionError(GroupStructureError):
    """The proposed action is not a homomorphism into Aut(N)."""


class UnsupportedOperationError(GammaRieszError, NotImplementedError):
    """Operation not available for this kind of group or signal."""


class NotRieszBasisError(GammaRieszError, ArithmeticError):
    """The transfer matrix is singular (or nearly so) somewhere on the grid."""

    def __init__(self, message, worst_point=None, worst_det=None):
        super().__init__(message)
        self.worst_point = worst_point
        self.worst_det = worst_det


class NonMonomialDeterminantError(GammaRieszError, ArithmeticError):
    """The exact Laurent path is unavailable because det F is not a monomial."""


class InternalConsistencyError(GammaRieszError, RuntimeError):
    """Two mathematically equivalent criteria disagreed beyond tolerance."""


class InfeasibleSamplingError(GammaRieszError, ValueError):
    """Sampling problem does not admit a stable reconstruction."""


class QuadratureOrderError(GammaRieszError, ValueError):
    """Requested quadrature order cannot integrate the integrand exactly."""

    def __init__(self, message, required_order):
        super().__init__(message)
        self.required_order = required_order


class FormatError(GammaRieszError, ValueError):
    """Input file does not follow the expected schema."""
