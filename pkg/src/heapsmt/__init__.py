"""SMT-LIB heap theory toolkit: parsing, reference semantics, lowering to arrays, ground solving."""

from .errors import (
    BudgetExceeded, ElaborationError, EvaluationError, FragmentError, GenerationError,
    HeapSmtError, LexError, ParseError, SortError, TranspileError,
)
from .elaborator import elaborate_script, elaborate_text
from .frontend import parse_script, print_script
from .semantics import Bounds, Evaluator, Interpretation, run_battery
from .transpiler import TranspileConfig, run_array_battery, transpile_script, transpile_text

__version__ = "0.1.0"
