"""Custom exception hierarchy for the chrg toolkit.

All toolkit-specific exceptions inherit from ChrgError, which carries the
process exit code the command line reports for it.

Hierarchy:
    ChrgError (base)
    ├── GrammarSyntaxError      : unparsable source text (line/column known)
    ├── GrammarError            : semantically invalid grammar
    │   ├── EmptyProductionError
    │   └── ContextPlacementError
    ├── EngineError             : contract violations inside the engine
    │   └── BuiltinError        : unknown builtin or bad builtin arguments
    └── InputValidationError    : invalid command-line / run configuration

A failing derivation is not an exception: the engine reports it as a
failed run and the command line exits with EXIT_FAILED_DERIVATION.
"""
from __future__ import annotations

EXIT_OK = 0
EXIT_FAILED_DERIVATION = 3


class ChrgError(Exception):
    """Base exception for the toolkit."""

    def __init__(self, message: str, exit_code: int = 1) -> None:
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


# ── Source Errors ─────────────────────────────────────────────────────

class GrammarSyntaxError(ChrgError):
    """Raised when term, rule or grammar text cannot be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"syntax error{where}: {message}", exit_code=1)


class GrammarError(ChrgError):
    """Raised when a grammar parses but cannot be compiled."""

    def __init__(self, message: str, exit_code: int = 2) -> None:
        super().__init__(message, exit_code)


class EmptyProductionError(GrammarError):
    """Raised for a production whose reduced side names no grammar symbol."""

    def __init__(self, production: str) -> None:
        self.production = production
        super().__init__(f"empty production: {production}")


class ContextPlacementError(GrammarError):
    """Raised for context markers that cannot be placed around a core."""


# ── Engine Errors ─────────────────────────────────────────────────────

class EngineError(ChrgError):
    """Raised when a program or caller breaks an engine contract."""

    def __init__(self, message: str) -> None:
        super().__init__(message, exit_code=4)


class BuiltinError(EngineError):
    """Raised when a builtin is unknown or called with arguments of the wrong sort."""

    def __init__(self, name: str, message: str) -> None:
        self.name = name
        super().__init__(f"builtin '{name}': {message}")


# ── Validation Errors ────────────────────────────────────────────────

class InputValidationError(ChrgError):
    """Raised when command-line input fails validation."""

    def __init__(self, message: str) -> None:
        super().__init__(message, exit_code=5)
