"""Exception types shared across the package."""


class StockRlError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigError(StockRlError, ValueError):
    """A parameter is outside its documented bounds."""


class DataError(StockRlError, ValueError):
    """Input data cannot be used as given."""


class ParseError(DataError):
    """A CSV row could not be parsed."""


class ValidationError(DataError):
    """A price record violates an OHLC invariant."""


class OrderingError(DataError):
    """Bar dates are not strictly increasing."""


class NumericalError(StockRlError, ArithmeticError):
    """A computation produced a non-finite value."""
