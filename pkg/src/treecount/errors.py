"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Raised when caller-supplied data violates a documented precondition."""


class ParseError(InputError):
    """Raised on malformed text input; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ProcedureError(RuntimeError):
    """Raised when an iterative procedure fails to reach its goal.

    Carries whatever diagnostic payload the procedure produced so far
    (last residual, surviving heavy edges, partial trace, ...).
    """

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
