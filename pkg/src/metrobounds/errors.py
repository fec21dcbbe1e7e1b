"""Exception and warning types raised across the package."""


class MetroError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(MetroError, ValueError):
    pass


class NegativeEigenvalue(MetroError, ValueError):
    pass


class DomainError(MetroError, ValueError):
    pass


class InvalidParameter(MetroError, ValueError):
    pass


class DimensionMismatch(MetroError, ValueError):
    pass


class RankDeficientDerivative(MetroError):
    """The Choi derivative leaves the support of the Choi matrix."""


class NotNormalized(MetroError, ValueError):
    pass


class SingularPdf(MetroError, ValueError):
    pass


class SolverFailure(MetroError):
    """Base for semidefinite solver failures."""


class Infeasible(SolverFailure):
    pass


class Unbounded(SolverFailure):
    pass


class MaxIterations(SolverFailure):
    pass


class NumericalBreakdown(SolverFailure):
    pass


class EqualityInconsistent(SolverFailure):
    """The linear equality constraints admit no solution."""


class NotClassicallySimulable(MetroError):
    pass


class UnboundedEpsilon(MetroError):
    pass


class ScaleLimit(MetroError, ValueError):
    pass


class ConvergenceFailure(MetroError):
    pass


class Divergent(MetroError, ValueError):
    """A requested bound is infinite at this setting."""


class OptimizationFailure(MetroError):
    pass


class PathologicalPoint(MetroError, ValueError):
    pass


class KernelDerivative(UserWarning):
    """The state derivative has weight on the kernel of the state."""


class DegenerateQuadratic(UserWarning):
    """The variational quadratic form has a singular Hessian."""
