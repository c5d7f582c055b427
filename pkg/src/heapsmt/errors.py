"""Exception hierarchy shared by every stage of the toolkit."""

from __future__ import annotations


class HeapSmtError(Exception):
    """Base class; carries an optional ``(line, column)`` span."""

    def __init__(self, message: str, span=None):
        self.message = message
        self.span = span
        if span is not None:
            message = f"{span.line}:{span.column}: {message}"
        super().__init__(message)


class LexError(HeapSmtError):
    pass


class ParseError(HeapSmtError):
    pass


class SortError(HeapSmtError):
    pass


class ElaborationError(HeapSmtError):
    pass


class EvaluationError(HeapSmtError):
    pass


class TranspileError(HeapSmtError):
    pass


class FragmentError(HeapSmtError):
    """Input lies outside the quantifier-free conjunctive heap fragment."""


class BudgetExceeded(HeapSmtError):
    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class GenerationError(HeapSmtError):
    pass
