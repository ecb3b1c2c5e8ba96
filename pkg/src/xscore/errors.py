"""Exception hierarchy shared by all engines.

The CLI maps these onto exit codes: parse errors exit 2, precondition
errors exit 3, cap errors exit 4.
"""


class XScoreError(Exception):
    exit_code = 1


class ParseError(XScoreError, ValueError):
    """Malformed input text, JSON, formula or query."""

    exit_code = 2


class StructuralError(ParseError):
    """Dangling gate or node reference, cycle, arity mismatch."""


class InputError(XScoreError, ValueError):
    """A value is missing or lies outside its declared domain."""

    exit_code = 3


class PreconditionError(XScoreError):
    """The operation's precondition does not hold for these inputs."""

    exit_code = 3


class CompilationError(PreconditionError):
    pass


class UnsupportedError(PreconditionError):
    pass


class CapExceeded(XScoreError):
    """An enumeration would exceed its configured cap."""

    exit_code = 4

    def __init__(self, message, reached=None):
        super().__init__(message)
        self.reached = reached
