"""Exception types raised by the l2plus library."""


class L2PlusError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(L2PlusError):
    """Matrix shapes are inconsistent with the declared dimensions."""


class NonFiniteEntry(L2PlusError):
    """A matrix contains NaN or infinite entries."""


class UnstableSystem(L2PlusError):
    """The state matrix is not Hurwitz."""


class SingularResolvent(L2PlusError):
    """(jwI - A) was numerically singular; unreachable for Hurwitz A and real w."""


class SingularDGamma(L2PlusError):
    """gamma collided with a singular value of D during the Hamiltonian test."""


class InvalidAlpha(L2PlusError):
    """Filter pole must be strictly negative."""


class NegativeDegree(L2PlusError):
    """Filter degree must be a nonnegative integer."""


class NumericalFailure(L2PlusError):
    """The conic solver stalled or returned an unusable solution."""


class InfeasibleProblem(L2PlusError):
    """The conic solver reported primal infeasibility."""


class ZeroMatrix(L2PlusError):
    """Matrix bound requested for an (effectively) zero matrix."""


class TooManyColumns(L2PlusError):
    """Brute-force oracle limited to small input dimensions."""


class StepTooCoarse(L2PlusError):
    """Sampling step too large for the requested signal frequency or delay."""


class ParseError(L2PlusError):
    """System description file could not be parsed."""
