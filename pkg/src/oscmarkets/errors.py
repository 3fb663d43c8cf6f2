"""Semantic exception hierarchy shared by every module in the package."""


class OscMarketsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OscMarketsError, ValueError):
    """A numeric argument violates an operation's domain contract."""


class DataError(OscMarketsError, ValueError):
    """Input data fails parsing, validation, or windowing constraints."""
