"""Exception hierarchy shared by every module."""


class EigenbcError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(EigenbcError, ValueError):
    """An input failed a structural check (shape, Hermitian, positivity, ...)."""


class AssumptionViolation(EigenbcError):
    """The symbol has a multiple zero, a zero on the unit circle, or an
    unexpected number of zeros at 0 / infinity."""


class NumericalFailure(EigenbcError, ArithmeticError):
    """A computation lost accuracy or two independent routes disagree."""
