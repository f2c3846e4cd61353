"""Exception hierarchy.  The CLI maps ValidationError subclasses to exit code 2."""


class StockcastError(Exception):
    pass


class ValidationError(StockcastError):
    """Input data violates a documented invariant."""


class FormatError(ValidationError):
    pass


class OrderingError(ValidationError):
    pass


class DomainError(StockcastError, ValueError):
    """Argument outside the domain of a function."""


class InsufficientDataError(StockcastError):
    pass


class DegenerateTargetError(StockcastError):
    pass


class SingularDesignError(StockcastError):
    pass


class NumericError(StockcastError, FloatingPointError):
    pass


class ShapeError(StockcastError, ValueError):
    pass
