"""Exception hierarchy shared by the library and the command line."""


class LeftDecompError(Exception):
    """Base class for all errors raised by :mod:`leftdecomp`."""


class InvalidInputError(LeftDecompError, ValueError):
    """Malformed data: wrong shapes, non-finite entries, mismatched atoms."""


class ValidationError(LeftDecompError, ValueError):
    """Well-formed data violating a mathematical requirement (e.g. not PSD)."""


class PreconditionError(ValidationError):
    """An operation was called outside its domain (e.g. an invalid pair)."""


class NumericalFailure(LeftDecompError, ArithmeticError):
    """A computed certificate exceeded its residual tolerance."""
