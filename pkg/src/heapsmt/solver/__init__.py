"""Satisfiability of quantifier-free conjunctions of heap literals."""

from .fragment import (
    Conjunction, Purified, conjunction_from_script, conjunction_from_text, purify,
)
from .search import DEFAULT_BUDGET, InternalError, SolveResult, solve

__all__ = [
    "Conjunction", "Purified", "conjunction_from_script", "conjunction_from_text", "purify",
    "DEFAULT_BUDGET", "InternalError", "SolveResult", "solve",
]
