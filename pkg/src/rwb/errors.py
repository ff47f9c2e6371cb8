"""Exception hierarchy shared by every rwb module."""


class RwbError(Exception):
    pass


class ParseError(RwbError):
    """Malformed token or grammar in theory-DSL source."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


class SortError(RwbError):
    pass


class RegularityError(ParseError):
    """A connective outside {true, &, exists} was used."""


class ArityError(RwbError):
    pass


class PreconditionError(RwbError):
    pass


class DiagramError(RwbError):
    pass


class NotInjective(RwbError):
    pass


class NotFunctional(RwbError):
    pass


class BudgetExhausted(RwbError):
    """Raised only where a caller needs a terminated chase and did not get one."""

    def __init__(self, steps, message=None):
        self.steps = steps
        super().__init__(message or f"chase budget of {steps} steps exhausted")
