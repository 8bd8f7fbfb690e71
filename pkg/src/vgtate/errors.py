"""Exception types raised across the package."""


class VGTError(Exception):
    """Base class for all package errors."""


class FieldMismatch(VGTError, ValueError):
    """Operands live in different finite fields."""


class DivisionByZero(VGTError, ZeroDivisionError):
    pass


class NotASquare(VGTError, ValueError):
    pass


class BadDenominator(VGTError, ValueError):
    """The prime divides the denominator of a rational argument."""


class BadPrime(VGTError, ValueError):
    """The prime is a place of bad reduction for the surface parameter."""


class BadParameter(VGTError, ValueError):
    pass


class UndefinedAtZeroOrInfinity(VGTError, ValueError):
    pass


class OracleBoundExceeded(VGTError, ValueError):
    pass
