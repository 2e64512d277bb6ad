"""Exception types shared across the package."""


class GradealgError(Exception):
    """Base class for all errors raised by this package."""


class MonoidMismatchError(GradealgError):
    """Two grades (or theories) from different grade monoids were combined."""


class TermError(GradealgError):
    """A term is ill-formed: bad arity, unequal child grades, bad coercion."""


class SupportError(GradealgError):
    """A model or enumeration was asked about a grade outside its support."""


class ResourceLimitError(GradealgError):
    """A bounded construction exceeded its configured cap."""

    def __init__(self, what, cap):
        super().__init__(f"{what} exceeded cap {cap}")
        self.cap = cap


class ParseError(GradealgError):
    """Lexical, grammar, or semantic error in a DSL file."""

    def __init__(self, message, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col
