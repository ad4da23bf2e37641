"""Exception and warning types raised by the solvers."""


class FracLangevinError(Exception):
    """Base class for all package errors."""


class DomainError(FracLangevinError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceError(FracLangevinError, ArithmeticError):
    """No evaluation regime reached the required accuracy."""


class DimensionMismatch(FracLangevinError, ValueError):
    """A coefficient vector does not match the spectrum truncation."""


class DegenerateGamma(FracLangevinError, ValueError):
    """gamma = 1: the non-local problem has no unique solution."""


class QuadratureError(FracLangevinError, ArithmeticError):
    """Adaptive quadrature ran out of budget before reaching its tolerance."""


class Unsolvable(FracLangevinError, ValueError):
    """The inverse problem violates the solvability condition on some mode of K0."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class InsufficientSpectrum(FracLangevinError, ValueError):
    """The spectrum does not reach far enough into the asymptotic regime."""


class IllConditioned(UserWarning):
    """A denominator Delta_k is small enough that recovery loses accuracy."""
