"""Exception types shared across the package."""


class CobcalcError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(CobcalcError):
    """Structurally incompatible inputs (ring mismatch, wrong arity, bad grammar)."""


class NotInvertible(CobcalcError):
    """A leading coefficient required to be a unit is not invertible."""


class IntegralityViolation(CobcalcError):
    """A coefficient failed the integrality test of its target domain.

    Carries the offending position and coefficient so certificates can
    point at the exact failure.
    """

    def __init__(self, message, exponent=None, coefficient=None):
        super().__init__(message)
        self.exponent = exponent
        self.coefficient = coefficient


class TruncationError(CobcalcError):
    """A requested value lies outside the computed window."""


class PreconditionError(CobcalcError):
    """An operation was invoked outside its stated domain of validity."""


class Unsupported(CobcalcError):
    """The input is valid mathematics but outside this implementation's scope."""
