class InvwbError(Exception):
    """Base class for every error raised by the workbench."""


class ParseError(InvwbError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class Undefined(InvwbError):
    """An expression has no value in the current state.

    Raised for partial-function domain violations, out-of-bounds
    indexing, unbound names and type clashes.  Checkers record it as an
    "undefined" verdict, which is distinct from "false".
    """


class ExecError(InvwbError):
    """Runtime failure of a statement (not an assertion)."""


class ConfigError(InvwbError):
    pass


class UnknownEntry(InvwbError):
    pass


class NothingToExplain(InvwbError):
    pass
