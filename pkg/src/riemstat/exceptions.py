"""Exception types raised by geometry, statistics and control routines."""


class RiemstatError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(RiemstatError, ValueError):
    """Array shapes are inconsistent with the declared manifold or system."""


class DegenerateInputError(RiemstatError, ValueError):
    """Input cannot be projected or processed (zero vector, rank deficiency, ...)."""


class CutLocusError(RiemstatError, ArithmeticError):
    """Logarithm/transport requested across or too close to the cut locus."""


class SingularInputError(RiemstatError, ArithmeticError):
    """A covariance or system matrix is singular where an inverse is required."""


class SingularSystemError(RiemstatError, ArithmeticError):
    """The tracking normal equations are singular."""


class NoConvergenceError(RiemstatError, ArithmeticError):
    """An iterative solver exhausted its iteration budget.

    Carries the iteration count in ``n_iter``.
    """

    def __init__(self, message, n_iter=None):
        super().__init__(message)
        self.n_iter = n_iter
