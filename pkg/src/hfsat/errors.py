"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HFSatError(Exception):
    """Base class for all package errors."""


class ResourceError(HFSatError):
    """A configured size, depth, or candidate cap would be exceeded."""


class ParseError(HFSatError):
    """Lexical or syntax error in formula, set, or model text."""

    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.message = message
        self.text = text
        self.pos = pos
        if pos is not None and text:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            self.line, self.col = line, col
            super().__init__(f"{message} at line {line}, column {col}")
        else:
            self.line = self.col = None
            super().__init__(message)


class SortError(ParseError):
    """A variable of the wrong sort occupies an argument position."""


class ValidationError(HFSatError):
    """A formula failed well-formedness checks; carries the diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class InvalidInterpretationError(HFSatError):
    """An assignment gives a map variable a value containing non-pairs."""


class EvaluationError(HFSatError):
    """Evaluation could not proceed (unassigned variable, undecodable pair)."""


class ContractError(HFSatError):
    """A precondition or postcondition of a model transfer was violated."""
