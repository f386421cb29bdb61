"""Exception hierarchy shared by all rislink modules."""


class RisError(Exception):
    """Base class for every error raised by rislink."""


class DomainError(RisError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """A hypergeometric lower parameter is a nonpositive integer."""


class ConvergenceError(RisError, ArithmeticError):
    """A series or iteration hit its term budget before converging."""


class QuadratureError(RisError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    The best estimate and its error bound are kept on the instance so
    callers can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class PoleProximityError(RisError, ArithmeticError):
    """A closed form is too close to one of its trigonometric poles.

    Use the quadrature evaluator instead.
    """


class NoRootError(RisError, ArithmeticError):
    """A design equation has no admissible positive root."""
