"""Exception hierarchy shared by every module in the package."""


class BranchingError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(BranchingError, ValueError):
    """A parameter or argument lies outside its admissible domain."""


class ConvergenceError(BranchingError, ArithmeticError):
    """A series, iteration or root search failed to converge."""


class ConsistencyError(BranchingError, ArithmeticError):
    """Two routes that must agree (classification vs. root, root vs. fixed point) did not."""


class EstimationError(ParameterDomainError):
    """The data cannot produce an estimate."""


class ZeroClassError(EstimationError):
    """No zero-offspring observations, so the zero-class estimator is undefined."""


class DegenerateSampleError(EstimationError):
    """Every observation is zero; the sample mean carries no information."""


class UnderflowClassError(BranchingError, ArithmeticError):
    """An observed class has probability below the floating-point underflow threshold."""

    def __init__(self, m: int, message: str | None = None):
        self.m = m
        super().__init__(message or f"class m={m} has pmf below the underflow threshold")
