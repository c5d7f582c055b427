"""Sorts, function symbols and sort-annotated terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .sexpr import Numeral, SExpr, SList, Symbol, slist, sym


@dataclass(frozen=True)
class Sort:
    name: str
    args: tuple["Sort", ...] = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"({self.name} {' '.join(str(a) for a in self.args)})"

    def to_sexpr(self) -> SExpr:
        if not self.args:
            return Symbol(self.name)
        return SList((Symbol(self.name),) + tuple(a.to_sexpr() for a in self.args))


BOOL = Sort("Bool")
INT = Sort("Int")


def array_sort(index: Sort, elem: Sort) -> Sort:
    return Sort("Array", (index, elem))


# Function-symbol kinds
CORE = "core"        # and, or, not, =>, xor, =, distinct, ite, true, false
ARITH = "arith"
ARRAY = "array"      # select, store, const
CTOR = "ctor"
SEL = "sel"
TEST = "test"
HEAP = "heap"        # read, write, allocate, valid, empty, null, nth
UF = "uf"            # declared (uninterpreted) function or constant
DEFINED = "defined"  # define-fun


@dataclass(frozen=True)
class FunSym:
    """A resolved, monomorphic function symbol.

    ``owner`` is the datatype name for constructors, selectors and testers,
    and the heap sort name for heap operations.  ``op`` names the operation
    inside its family (heap op name, constructor name for selectors and
    testers).  ``index`` is the nth-address index or the selector position.
    """

    name: str
    kind: str
    params: tuple[Sort, ...]
    result: Sort
    owner: str = ""
    op: str = ""
    index: int = 0

    def __repr__(self):
        return f"FunSym({self.name}:{self.kind})"


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool]
    sort: Sort


@dataclass(frozen=True)
class App:
    fn: FunSym
    args: tuple = ()

    @property
    def sort(self) -> Sort:
        return self.fn.result


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" | "exists"
    binders: tuple[tuple[str, Sort], ...]
    body: "Term"
    sort: Sort = field(default=BOOL, init=False)


@dataclass(frozen=True)
class Let:
    bindings: tuple[tuple[str, "Term"], ...]
    body: "Term"

    @property
    def sort(self) -> Sort:
        return self.body.sort


Term = Union[Var, Lit, App, Quant, Let]

TRUE = Lit(True, BOOL)
FALSE = Lit(False, BOOL)


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal (does not descend into let-bound definitions twice)."""
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, Quant):
        yield from subterms(t.body)
    elif isinstance(t, Let):
        for _, v in t.bindings:
            yield from subterms(v)
        yield from subterms(t.body)


def constants(t: Term) -> dict[str, Sort]:
    """Nullary uninterpreted symbols occurring in ``t`` (the model's free constants)."""
    out: dict[str, Sort] = {}
    for s in subterms(t):
        if isinstance(s, App) and s.fn.kind == UF and not s.fn.params:
            out[s.fn.name] = s.fn.result
    return out


def free_vars(t: Term, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(t, Var):
        return set() if t.name in bound else {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(t, Quant):
        return free_vars(t.body, bound | {n for n, _ in t.binders})
    if isinstance(t, Let):
        out = set()
        for _, v in t.bindings:
            out |= free_vars(v, bound)
        return out | free_vars(t.body, bound | {n for n, _ in t.bindings})
    return set()


# ---------------------------------------------------------------------------
# Construction helpers for core operators.

def _core(name: str, params, result=BOOL) -> FunSym:
    return FunSym(name, CORE, tuple(params), result)


def mk_and(*args: Term) -> Term:
    flat = []
    for a in args:
        if a == TRUE:
            continue
        if isinstance(a, App) and a.fn.kind == CORE and a.fn.name == "and":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return App(_core("and", [BOOL] * len(flat)), tuple(flat))


def mk_or(*args: Term) -> Term:
    flat = [a for a in args if a != FALSE]
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return App(_core("or", [BOOL] * len(flat)), tuple(flat))


def mk_not(a: Term) -> Term:
    return App(_core("not", [BOOL]), (a,))


def mk_implies(a: Term, b: Term) -> Term:
    if a == TRUE:
        return b
    return App(_core("=>", [BOOL, BOOL]), (a, b))


def mk_eq(a: Term, b: Term) -> Term:
    return App(_core("=", [a.sort, b.sort]), (a, b))


def mk_ite(c: Term, a: Term, b: Term) -> Term:
    return App(_core("ite", [BOOL, a.sort, b.sort], a.sort), (c, a, b))


def mk_int(n: int) -> Lit:
    return Lit(n, INT)


def mk_arith(name: str, *args: Term) -> App:
    result = BOOL if name in ("<", "<=", ">", ">=") else INT
    return App(FunSym(name, ARITH, tuple(INT for _ in args), result), tuple(args))


def mk_forall(binders, body: Term) -> Term:
    binders = tuple(binders)
    return Quant("forall", binders, body) if binders else body


def mk_exists(binders, body: Term) -> Term:
    binders = tuple(binders)
    return Quant("exists", binders, body) if binders else body


def mk_select(arr: Term, idx: Term) -> App:
    elem = arr.sort.args[1]
    return App(FunSym("select", ARRAY, (arr.sort, idx.sort), elem), (arr, idx))


def mk_store(arr: Term, idx: Term, val: Term) -> App:
    return App(FunSym("store", ARRAY, (arr.sort, idx.sort, val.sort), arr.sort), (arr, idx, val))


def mk_const_array(sort: Sort, val: Term) -> App:
    return App(FunSym("const", ARRAY, (val.sort,), sort), (val,))


# ---------------------------------------------------------------------------
# Back to concrete syntax.

def term_to_sexpr(t: Term) -> SExpr:
    if isinstance(t, Var):
        return Symbol(t.name)
    if isinstance(t, Lit):
        if t.sort == BOOL:
            return sym("true" if t.value else "false")
        if t.value < 0:
            return slist(sym("-"), Numeral(-t.value))
        return Numeral(t.value)
    if isinstance(t, Quant):
        binders = SList(tuple(slist(sym(n), s.to_sexpr()) for n, s in t.binders))
        return slist(sym(t.kind), binders, term_to_sexpr(t.body))
    if isinstance(t, Let):
        binds = SList(tuple(slist(sym(n), term_to_sexpr(v)) for n, v in t.bindings))
        return slist(sym("let"), binds, term_to_sexpr(t.body))
    fn = t.fn
    if fn.kind == HEAP and fn.op == "nth":
        head: SExpr = slist(sym("_"), sym(fn.name), Numeral(fn.index))
    elif fn.kind == TEST:
        head = slist(sym("_"), sym("is"), sym(fn.op))
    elif fn.kind == ARRAY and fn.name == "const":
        head = slist(sym("as"), sym("const"), fn.result.to_sexpr())
    else:
        head = sym(fn.name)
    if not t.args:
        return head
    return SList((head,) + tuple(term_to_sexpr(a) for a in t.args))
