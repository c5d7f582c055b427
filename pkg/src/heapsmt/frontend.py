"""SMT-LIB scripts as command sequences, including the ``declare-heap`` command.

Commands outside the supported subset are kept as :class:`OpaqueCommand`
nodes so that they survive a parse/print round trip untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError
from .sexpr import (
    Keyword, Numeral, SExpr, SList, Span, Symbol, Token, parse_sexprs,
    print_sexprs, tokenize,
)

KNOWN_COMMANDS = frozenset({
    "set-logic", "set-info", "set-option", "declare-sort", "declare-datatype",
    "declare-datatypes", "declare-heap", "declare-fun", "declare-const",
    "define-fun", "assert", "check-sat", "get-model", "exit",
})

DECLARE_HEAP_GRAMMAR = (
    "( declare-heap <symbol> <symbol> <sort> <term> "
    "( <sort_dec>^n ) ( <heap_datatype_dec>^n ) )"
)


@dataclass(frozen=True)
class HeapDeclSyntax:
    heap_sort: str
    addr_sort: str
    object_sort: SExpr
    default_object: SExpr
    sort_decs: tuple[tuple[str, int], ...]
    constructor_decs: tuple[SList, ...]


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple[SExpr, ...]
    span: Span | None = field(default=None, compare=False, repr=False)

    def to_sexpr(self) -> SList:
        return SList((Symbol(self.name),) + self.args)


@dataclass(frozen=True)
class DeclareHeap(Command):
    decl: HeapDeclSyntax | None = None


@dataclass(frozen=True)
class OpaqueCommand:
    """A top-level form this toolkit does not interpret."""

    sexpr: SExpr
    span: Span | None = field(default=None, compare=False, repr=False)

    @property
    def name(self) -> str | None:
        if isinstance(self.sexpr, SList) and self.sexpr.items and isinstance(self.sexpr[0], Symbol):
            return self.sexpr[0].name
        return None

    def to_sexpr(self) -> SExpr:
        return self.sexpr


def _symbol_name(e: SExpr, what: str) -> str:
    if not isinstance(e, Symbol):
        raise ParseError(f"expected {what} (a symbol)", getattr(e, "span", None))
    return e.name


def _heap_error(msg: str, span) -> ParseError:
    return ParseError(f"malformed declare-heap: {msg}; expected {DECLARE_HEAP_GRAMMAR}", span)


def parse_heap_decl(form: SList) -> HeapDeclSyntax:
    args = form.items[1:]
    if len(args) != 6:
        missing = " (missing default-object term?)" if len(args) == 5 else ""
        raise _heap_error(f"found {len(args)} arguments instead of 6{missing}", form.span)
    heap, addr, obj, default, sort_decs, ctor_lists = args
    if not isinstance(heap, Symbol):
        raise _heap_error("heap sort name must be a symbol", form.span)
    if not isinstance(addr, Symbol):
        raise _heap_error("address sort name must be a symbol", form.span)
    if not isinstance(sort_decs, SList):
        raise _heap_error("sort declarations must be a list", form.span)
    if not isinstance(ctor_lists, SList):
        raise _heap_error("datatype declarations must be a list", form.span)
    decs = []
    for dec in sort_decs:
        if not (isinstance(dec, SList) and len(dec) == 2 and isinstance(dec[0], Symbol)
                and isinstance(dec[1], Numeral)):
            raise _heap_error("each <sort_dec> must be (<symbol> <numeral>)", getattr(dec, "span", form.span))
        decs.append((dec[0].name, dec[1].value))
    if len(decs) != len(ctor_lists):
        raise _heap_error(
            f"{len(decs)} sort declaration(s) but {len(ctor_lists)} constructor list(s)", form.span)
    for clist in ctor_lists:
        if not isinstance(clist, SList) or len(clist) == 0:
            raise _heap_error("each <heap_datatype_dec> is a non-empty list of constructors",
                              getattr(clist, "span", form.span))
        if isinstance(clist[0], Symbol) and clist[0].name == "par":
            raise ParseError("polymorphic constructor declarations (par) are not supported "
                             "in declare-heap", clist.span)
    return HeapDeclSyntax(heap.name, addr.name, obj, default, tuple(decs), tuple(ctor_lists))


_ARITY = {
    "assert": (1, 1), "check-sat": (0, 0), "get-model": (0, 0), "exit": (0, 0),
    "set-logic": (1, 1), "declare-sort": (1, 2), "declare-fun": (3, 3),
    "declare-const": (2, 2), "define-fun": (4, 4), "declare-datatype": (2, 2),
    "declare-datatypes": (2, 2), "set-info": (1, 2), "set-option": (1, 2),
}


def _check_shape(name: str, form: SList) -> None:
    args = form.items[1:]
    lo, hi = _ARITY[name]
    if not lo <= len(args) <= hi:
        raise ParseError(f"{name} expects {lo if lo == hi else f'{lo}-{hi}'} argument(s), "
                         f"got {len(args)}", form.span)
    if name in ("declare-fun", "declare-const", "define-fun", "set-logic", "declare-sort",
                "declare-datatype"):
        _symbol_name(args[0], f"{name} name")
    if name in ("declare-fun", "define-fun") and not isinstance(args[1], SList):
        raise ParseError(f"{name} expects a parameter list", form.span)
    if name in ("set-info", "set-option") and not isinstance(args[0], Keyword):
        raise ParseError(f"{name} expects a keyword", form.span)


def command_from_sexpr(form: SExpr) -> Command | OpaqueCommand:
    if not isinstance(form, SList) or not form.items or not isinstance(form[0], Symbol):
        raise ParseError("top-level form must be a command list", getattr(form, "span", None))
    name = form[0].name
    if name not in KNOWN_COMMANDS:
        return OpaqueCommand(form, form.span)
    if name == "declare-heap":
        return DeclareHeap(name, form.items[1:], form.span, parse_heap_decl(form))
    _check_shape(name, form)
    return Command(name, form.items[1:], form.span)


def parse_script(tokens: Sequence[Token] | str) -> list[Command | OpaqueCommand]:
    """Parse a token stream (or raw text) into commands."""
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return [command_from_sexpr(form) for form in parse_sexprs(tokens)]


def print_script(commands: Iterable[Command | OpaqueCommand], width: int = 100) -> str:
    return print_sexprs((c.to_sexpr() for c in commands), width)
