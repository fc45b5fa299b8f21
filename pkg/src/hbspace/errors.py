"""Exception types raised by the library."""


class HbError(Exception):
    """Base class for library errors."""


class SymbolError(HbError, ValueError):
    """Invalid symbol specification or violated symbol invariant."""


class PreconditionError(HbError, ValueError):
    """An operation was called outside its hypotheses."""


class TruncationError(HbError):
    """A truncated representation is too small for the request."""


class RangeResidualError(HbError):
    """A vector lies substantially outside the numerical range of D."""
