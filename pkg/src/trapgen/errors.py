"""Exception hierarchy for trapgen."""


class TrapgenError(Exception):
    """Base class for every error raised by this package."""


class MalformedInput(TrapgenError):
    pass


class ParseError(MalformedInput):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class UnsolvableDivisibility(TrapgenError):
    pass


class SpanViolation(TrapgenError):
    """A vector lies outside the span of a change of basis.

    Raised only when a caller passes a vector that does not satisfy the
    divisibility constraint the basis was built for, so it signals a bug.
    """


class BacktrackViolation(TrapgenError):
    """The sampler met an interval with no admissible value."""


class UnsatisfiableComplement(TrapgenError):
    pass
