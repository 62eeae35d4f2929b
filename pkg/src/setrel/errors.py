"""Exception types shared across the solver."""


class SetRelError(Exception):
    """Base class for all solver errors."""


class SortMismatch(SetRelError):
    def __init__(self, message: str, expected=None, got=None, line=None, col=None):
        super().__init__(message)
        self.expected = expected
        self.got = got
        self.line = line
        self.col = col

    def __str__(self) -> str:
        msg = super().__str__()
        if self.line is not None:
            return f"{self.line}:{self.col}: {msg}"
        return msg


class ArityMismatch(SetRelError):
    pass


class ParseError(SetRelError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class UndeclaredSymbol(ParseError):
    pass


class DnfCapExceeded(SetRelError):
    """The DNF expansion exceeded the configured disjunct cap."""


class UnsupportedLiteral(SetRelError):
    """An oracle received a literal outside its language."""


class OracleIncomplete(SetRelError):
    """An oracle reported sat but could not produce an assignment."""


class UnassignedVariable(SetRelError):
    """Direct evaluation hit a variable the model does not assign."""
