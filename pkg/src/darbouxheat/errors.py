"""Exception types raised across the package."""


class DarbouxHeatError(Exception):
    """Base class for all package errors."""


class InvalidChain(DarbouxHeatError, ValueError):
    """A dressing chain violates the ordering or parity rules."""


class DegenerateWronskian(DarbouxHeatError, ArithmeticError):
    """The Wronskian vanishes (numerically) relative to its row norms."""


class DomainError(DarbouxHeatError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class QuadratureFailure(DarbouxHeatError, ArithmeticError):
    """A quadrature did not reach its tolerance within the panel budget."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class StabilityError(DarbouxHeatError, ArithmeticError):
    """A time stepper grew faster than the analytic bound allows."""


class ConvergenceError(DarbouxHeatError, ArithmeticError):
    """Successive grid refinements disagree beyond tolerance."""
