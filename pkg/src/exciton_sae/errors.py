"""Exception hierarchy shared by every module of the package."""


class ExcitonSAEError(Exception):
    """Base class for all package errors."""


class DomainError(ExcitonSAEError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(ExcitonSAEError, ArithmeticError):
    """A gamma-function argument sits on (or within tolerance of) a pole.

    ``tag`` names which factor hit the pole, so callers that treat poles as
    closed-form spectral points can tell them apart.
    """

    def __init__(self, message, tag=None, argument=None):
        super().__init__(message)
        self.tag = tag
        self.argument = argument


class DegenerateIndexError(ExcitonSAEError, ArithmeticError):
    """2*mu is (within tolerance) an integer: logarithmic Whittaker case."""


class ConvergenceError(ExcitonSAEError, ArithmeticError):
    """An iterative method exhausted its budget before reaching tolerance."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature could not meet the requested tolerance."""


class ConditioningError(ExcitonSAEError, ArithmeticError):
    """A small linear system is too ill-conditioned to trust.

    ``condition`` carries the estimate that triggered the error.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class AsymptoticsError(ConvergenceError):
    """A large-argument expansion failed to converge at the chosen cutoff."""


class StepSizeError(ConvergenceError):
    """The ODE integrator failed (step size underflow / stiffness)."""
