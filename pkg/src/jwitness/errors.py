"""Exception hierarchy shared by the numerical modules and the CLI.

The CLI maps :class:`PreconditionError` to exit status 2 and
:class:`NumericalFailure` to exit status 3.
"""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


class NumericalFailure(ArithmeticError):
    """A numerical procedure could not reach its stated accuracy."""


class ReductionError(NumericalFailure):
    pass


class ContourProximityError(NumericalFailure):
    """A zero of the integrand lies (numerically) on the contour."""

    def __init__(self, message, min_modulus=None):
        super().__init__(message)
        self.min_modulus = min_modulus


class NewtonError(NumericalFailure):
    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class InversionError(NewtonError):
    pass
