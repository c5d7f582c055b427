"""Elaboration of declarations and type checking of terms.

A ``declare-heap`` command is turned into a :class:`HeapSignature`: the heap
and address sorts, the object datatypes declared alongside them, the
allocation-result pair datatype, and the heap operation symbols.  Every
later term is type checked against the resulting :class:`SortTable`.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import terms as T
from .errors import ElaborationError, SortError
from .frontend import Command, DeclareHeap, HeapDeclSyntax, OpaqueCommand
from .sexpr import Keyword, Literal, Numeral, SExpr, SList, Symbol
from .terms import (
    ARITH, ARRAY, BOOL, CORE, CTOR, DEFINED, HEAP, INT, SEL, TEST, UF,
    App, FunSym, Let, Lit, Quant, Sort, Term, Var,
)

# Sort kinds
BUILTIN = "builtin"
UNINTERPRETED = "uninterpreted"
ADT = "adt"
HEAP_SORT = "heap"
ADDRESS = "address"
ALLOC_RESULT = "alloc-result"

HEAP_OPS = ("read", "write", "allocate", "valid", "empty", "null", "nth")


@dataclass(frozen=True)
class Constructor:
    name: str
    fields: tuple[tuple[str, Sort], ...]
    datatype: str

    @property
    def selectors(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.fields)

    @property
    def tester(self) -> str:
        return "is-" + self.name


@dataclass(frozen=True)
class Datatype:
    name: str
    constructors: tuple[Constructor, ...]

    def constructor(self, name: str) -> Constructor:
        for c in self.constructors:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class HeapSignature:
    """Everything one ``declare-heap`` introduces."""

    heap_sort: Sort
    address_sort: Sort
    object_sort: Sort
    def_obj: Term
    alloc_result_sort: Sort
    alloc_ctor: str
    datatypes: tuple[str, ...]
    symbols: tuple[tuple[str, str], ...]

    @property
    def name(self) -> str:
        return self.heap_sort.name

    @property
    def names(self) -> dict[str, str]:
        return dict(self.symbols)

    # Function symbols -----------------------------------------------------
    def fun(self, op: str, index: int = 0) -> FunSym:
        H, A, O, AR = self.heap_sort, self.address_sort, self.object_sort, self.alloc_result_sort
        n = self.names
        if op == "read":
            return FunSym("read", HEAP, (H, A), O, H.name, "read")
        if op == "write":
            return FunSym("write", HEAP, (H, A, O), H, H.name, "write")
        if op == "allocate":
            return FunSym("allocate", HEAP, (H, O), AR, H.name, "allocate")
        if op == "valid":
            return FunSym("valid", HEAP, (H, A), BOOL, H.name, "valid")
        if op == "empty":
            return FunSym(n["emptyHeap"], HEAP, (), H, H.name, "empty")
        if op == "null":
            return FunSym(n["nullAddress"], HEAP, (), A, H.name, "null")
        if op == "nth":
            return FunSym(n["nthAddress"], HEAP, (), A, H.name, "nth", index)
        if op == "_1":
            return FunSym("_1", SEL, (AR,), H, AR.name, self.alloc_ctor, 0)
        if op == "_2":
            return FunSym("_2", SEL, (AR,), A, AR.name, self.alloc_ctor, 1)
        if op == "pair":
            return FunSym(self.alloc_ctor, CTOR, (H, A), AR, AR.name, self.alloc_ctor)
        raise KeyError(op)

    # Term builders ---------------------------------------------------------
    def read(self, h, a):
        return App(self.fun("read"), (h, a))

    def write(self, h, a, o):
        return App(self.fun("write"), (h, a, o))

    def allocate(self, h, o):
        return App(self.fun("allocate"), (h, o))

    def valid(self, h, a):
        return App(self.fun("valid"), (h, a))

    def empty(self):
        return App(self.fun("empty"))

    def null(self):
        return App(self.fun("null"))

    def nth(self, i: int):
        return App(self.fun("nth", i))

    def first(self, ar):
        return App(self.fun("_1"), (ar,))

    def second(self, ar):
        return App(self.fun("_2"), (ar,))


@dataclass
class SortInfo:
    name: str
    arity: int
    kind: str
    owner: str = ""  # heap sort name for heap/address/alloc-result sorts


class SortTable:
    """Declared sorts, datatypes, function symbols and heap signatures."""

    def __init__(self):
        self.sorts: dict[str, SortInfo] = {
            "Bool": SortInfo("Bool", 0, BUILTIN),
            "Int": SortInfo("Int", 0, BUILTIN),
            "Array": SortInfo("Array", 2, BUILTIN),
        }
        self.datatypes: dict[str, Datatype] = {}
        self.constructors: dict[str, Constructor] = {}
        self.functions: dict[str, list[FunSym]] = {}
        self.defines: dict[str, tuple[tuple[str, ...], Term]] = {}
        self.heaps: dict[str, HeapSignature] = {}
        self.address_owner: dict[str, str] = {}

    def copy(self) -> "SortTable":
        other = SortTable.__new__(SortTable)
        other.sorts = {k: copy.copy(v) for k, v in self.sorts.items()}
        other.datatypes = dict(self.datatypes)
        other.constructors = dict(self.constructors)
        other.functions = {k: list(v) for k, v in self.functions.items()}
        other.defines = dict(self.defines)
        other.heaps = dict(self.heaps)
        other.address_owner = dict(self.address_owner)
        return other

    # Sorts ------------------------------------------------------------------
    def declare_sort(self, name: str, arity: int, kind: str, owner: str = "", span=None) -> Sort:
        if name in self.sorts:
            raise ElaborationError(f"sort {name} is already declared", span)
        self.sorts[name] = SortInfo(name, arity, kind, owner)
        return Sort(name)

    def kind(self, sort: Sort) -> str:
        return self.sorts[sort.name].kind

    def heap_of(self, sort: Sort) -> HeapSignature | None:
        info = self.sorts.get(sort.name)
        if info is None or not info.owner:
            return None
        return self.heaps.get(info.owner)

    def resolve_sort(self, e: SExpr) -> Sort:
        if isinstance(e, Symbol):
            info = self.sorts.get(e.name)
            if info is None:
                raise SortError(f"unknown sort {e.name}", e.span)
            if info.arity != 0:
                raise SortError(f"sort {e.name} expects {info.arity} argument(s)", e.span)
            return Sort(e.name)
        if isinstance(e, SList) and len(e) >= 2 and isinstance(e[0], Symbol):
            info = self.sorts.get(e[0].name)
            if info is None:
                raise SortError(f"unknown sort {e[0].name}", e.span)
            args = tuple(self.resolve_sort(a) for a in e.items[1:])
            if len(args) != info.arity:
                raise SortError(f"sort {e[0].name} expects {info.arity} argument(s)", e.span)
            return Sort(e[0].name, args)
        raise SortError(f"malformed sort expression", getattr(e, "span", None))

    # Functions ----------------------------------------------------------------
    def add_function(self, fs: FunSym, span=None) -> None:
        existing = self.functions.setdefault(fs.name, [])
        for other in existing:
            if other.params == fs.params:
                raise ElaborationError(f"function {fs.name} is already declared with this rank", span)
        existing.append(fs)

    def lookup(self, name: str) -> list[FunSym]:
        return self.functions.get(name, [])

    def has_symbol(self, name: str) -> bool:
        return name in self.functions

    def add_datatype(self, dt: Datatype, span=None) -> None:
        self.datatypes[dt.name] = dt
        sort = Sort(dt.name)
        for c in dt.constructors:
            if c.name in self.constructors:
                raise ElaborationError(f"constructor {c.name} is already declared", span)
            self.constructors[c.name] = c
            params = tuple(s for _, s in c.fields)
            self.add_function(FunSym(c.name, CTOR, params, sort, dt.name, c.name), span)
            self.add_function(FunSym(c.tester, TEST, (sort,), BOOL, dt.name, c.name), span)
            for i, (sel, s) in enumerate(c.fields):
                self.add_function(FunSym(sel, SEL, (sort,), s, dt.name, c.name, i), span)

    def sort_contains(self, sort: Sort, kinds: set[str], seen=None) -> bool:
        """Whether values of ``sort`` can contain a sort of one of ``kinds``."""
        seen = set() if seen is None else seen
        if sort in seen:
            return False
        seen.add(sort)
        info = self.sorts.get(sort.name)
        if info is not None and info.kind in kinds:
            return True
        if any(self.sort_contains(a, kinds, seen) for a in sort.args):
            return True
        dt = self.datatypes.get(sort.name)
        if dt is not None:
            return any(self.sort_contains(s, kinds, seen) for c in dt.constructors for _, s in c.fields)
        return False


# ---------------------------------------------------------------------------
# Datatype declarations

def _parse_constructors(clist: SList, dt_name: str, table: SortTable) -> tuple[Constructor, ...]:
    ctors = []
    for cdec in clist:
        if isinstance(cdec, Symbol):
            ctors.append(Constructor(cdec.name, (), dt_name))
            continue
        if not (isinstance(cdec, SList) and len(cdec) >= 1 and isinstance(cdec[0], Symbol)):
            raise ElaborationError("malformed constructor declaration", getattr(cdec, "span", None))
        if cdec[0].name == "par":
            raise ElaborationError("polymorphic constructor declarations are not supported", cdec.span)
        fields = []
        for sdec in cdec.items[1:]:
            if not (isinstance(sdec, SList) and len(sdec) == 2 and isinstance(sdec[0], Symbol)):
                raise ElaborationError("malformed selector declaration", getattr(sdec, "span", None))
            fields.append((sdec[0].name, table.resolve_sort(sdec[1])))
        ctors.append(Constructor(cdec[0].name, tuple(fields), dt_name))
    return tuple(ctors)


def declare_datatypes(names: Sequence[tuple[str, int]], ctor_lists: Sequence[SList],
                      table: SortTable, span=None) -> list[Datatype]:
    for name, arity in names:
        if arity != 0:
            raise ElaborationError(f"parametric datatype {name} is not supported", span)
        table.declare_sort(name, 0, ADT, span=span)
    dts = []
    for (name, _), clist in zip(names, ctor_lists):
        if not isinstance(clist, SList) or not clist.items:
            raise ElaborationError(f"datatype {name} needs at least one constructor", span)
        dts.append(Datatype(name, _parse_constructors(clist, name, table)))
    for dt in dts:
        table.add_datatype(dt, span)
    return dts


# ---------------------------------------------------------------------------
# Heap declarations

def mangle_names(heap_sort: str, addr_sort: str) -> dict[str, str]:
    """Symbol names generated for one heap declaration.

    ``read``, ``write``, ``allocate``, ``valid`` and the pair selectors are
    resolved by argument sort and keep their plain names.
    """
    return {
        "read": "read",
        "write": "write",
        "allocate": "allocate",
        "valid": "valid",
        "emptyHeap": "empty" + heap_sort,
        "nullAddress": "null" + addr_sort,
        "nthAddress": "nth" + addr_sort,
        "AllocationResult": "AllocationResult" + heap_sort,
        "AllocResult": "AllocResult" + heap_sort,
        "_1": "_1",
        "_2": "_2",
    }


def elaborate_heap_decl(decl: HeapDeclSyntax, table: SortTable, span=None) -> HeapSignature:
    """Register everything ``decl`` introduces in ``table`` and return its signature."""
    H, A = decl.heap_sort, decl.addr_sort
    if H == A:
        raise ElaborationError(f"address sort name {A} collides with heap sort name {H}", span)
    for name in [H, A] + [n for n, _ in decl.sort_decs]:
        if name in table.sorts:
            raise ElaborationError(f"sort {name} is already declared", span)
    names = mangle_names(H, A)
    if names["AllocationResult"] in table.sorts:
        raise ElaborationError(f"generated sort {names['AllocationResult']} collides with a declared sort", span)
    for key in ("emptyHeap", "nullAddress", "nthAddress", "AllocResult"):
        if table.has_symbol(names[key]):
            raise ElaborationError(
                f"generated symbol {names[key]} collides with a user-declared symbol", span)
    if isinstance(decl.object_sort, Symbol) and decl.object_sort.name == H:
        raise ElaborationError(
            f"object sort must not be the heap sort {H} (the object sort may be any sort except the heap sort)",
            span)

    heap_sort = table.declare_sort(H, 0, HEAP_SORT, owner=H, span=span)
    addr_sort = table.declare_sort(A, 0, ADDRESS, owner=H, span=span)
    table.address_owner[A] = H

    # Phase one: the object-world datatypes (they may refer to the address sort).
    dts = declare_datatypes(decl.sort_decs, decl.constructor_decs, table, span)
    for dt in dts:
        for c in dt.constructors:
            for sel, s in c.fields:
                if table.sort_contains(s, {HEAP_SORT, ALLOC_RESULT}):
                    raise ElaborationError(
                        f"field {sel} of {c.name} has sort {s}: heaps are not storable objects", span)
                if s.name == "Array" and table.sort_contains(s, {ADDRESS}):
                    raise ElaborationError(
                        f"field {sel} of {c.name}: arrays containing addresses are not supported", span)

    object_sort = table.resolve_sort(decl.object_sort)
    if table.kind(object_sort) in (HEAP_SORT, ALLOC_RESULT):
        raise ElaborationError(f"object sort {object_sort} is not storable on a heap", span)

    ar_name = names["AllocationResult"]
    ar_sort = table.declare_sort(ar_name, 0, ALLOC_RESULT, owner=H, span=span)
    ctor = Constructor(names["AllocResult"], (("_1", heap_sort), ("_2", addr_sort)), ar_name)
    table.datatypes[ar_name] = Datatype(ar_name, (ctor,))
    table.constructors[ctor.name] = ctor

    sig = HeapSignature(
        heap_sort=heap_sort, address_sort=addr_sort, object_sort=object_sort,
        def_obj=T.TRUE, alloc_result_sort=ar_sort, alloc_ctor=ctor.name,
        datatypes=tuple(dt.name for dt in dts), symbols=tuple(names.items()))
    for op in ("read", "write", "allocate", "valid", "empty", "null", "_1", "_2", "pair"):
        table.add_function(sig.fun(op), span)
    table.add_function(FunSym(ctor.tester, TEST, (ar_sort,), BOOL, ar_name, ctor.name), span)
    table.heaps[H] = sig

    # Phase two: the default object, which may use constructors declared above.
    def_obj = typecheck_term(decl.default_object, table)
    if def_obj.sort != object_sort:
        raise ElaborationError(
            f"default object has sort {def_obj.sort}, expected object sort {object_sort}", span)
    if T.free_vars(def_obj):
        raise ElaborationError("default object must be a closed term", span)
    sig = HeapSignature(**{**sig.__dict__, "def_obj": def_obj})
    table.heaps[H] = sig
    return sig


# ---------------------------------------------------------------------------
# Type checking

_BOOL_NARY = {"and", "or", "xor", "=>"}
_ARITH_OPS = {"+", "-", "*", "div", "mod", "abs", "<", "<=", ">", ">="}


class _Checker:
    def __init__(self, table: SortTable):
        self.table = table

    def fail(self, msg, e):
        raise SortError(msg, getattr(e, "span", None))

    def check(self, e: SExpr, env: dict[str, Sort]) -> Term:
        if isinstance(e, Numeral):
            return Lit(e.value, INT)
        if isinstance(e, Symbol):
            return self.symbol(e, env)
        if isinstance(e, (Keyword, Literal)):
            self.fail(f"unsupported literal {getattr(e, 'text', e)}", e)
        if not isinstance(e, SList) or not e.items:
            self.fail("empty application", e)
        head = e[0]
        if isinstance(head, Symbol):
            name = head.name
            if name in ("forall", "exists"):
                return self.quantifier(e, env)
            if name == "let":
                return self.let(e, env)
            if name == "!":
                if len(e) < 2:
                    self.fail("annotation without a term", e)
                return self.check(e[1], env)
            if name == "_":
                return self.indexed(e, env)
            if name == "as":
                return self.qualified(e, env, ())
            args = tuple(self.check(a, env) for a in e.items[1:])
            return self.apply(name, args, e)
        if isinstance(head, SList) and head.items and isinstance(head[0], Symbol):
            args = tuple(self.check(a, env) for a in e.items[1:])
            kind = head[0].name
            if kind == "_" and len(head) == 3 and isinstance(head[1], Symbol) and head[1].name == "is":
                return self.tester(head[2], args, e)
            if kind == "as":
                return self.qualified(head, env, args)
        self.fail("unsupported application head", e)

    # Atoms -----------------------------------------------------------------
    def symbol(self, e: Symbol, env) -> Term:
        if e.name in env:
            return Var(e.name, env[e.name])
        if e.name in ("true", "false"):
            return Lit(e.name == "true", BOOL)
        nullary = [f for f in self.table.lookup(e.name) if not f.params]
        if not nullary:
            if self.table.lookup(e.name):
                self.fail(f"function {e.name} applied to no arguments", e)
            self.fail(f"unknown symbol {e.name}", e)
        if len(nullary) > 1:
            self.fail(f"ambiguous constant {e.name}; qualify it with (as {e.name} <sort>)", e)
        return App(nullary[0])

    def indexed(self, e: SList, env) -> Term:
        if len(e) == 3 and isinstance(e[1], Symbol) and isinstance(e[2], Numeral):
            for sig in self.table.heaps.values():
                if e[1].name == sig.names["nthAddress"]:
                    return sig.nth(e[2].value)
        self.fail(f"unknown indexed identifier {e}", e)

    def qualified(self, e: SList, env, args) -> Term:
        if len(e) != 3:
            self.fail("malformed (as <identifier> <sort>)", e)
        sort = self.table.resolve_sort(e[2])
        ident = e[1]
        if isinstance(ident, Symbol) and ident.name == "const":
            if sort.name != "Array" or len(args) != 1:
                self.fail("(as const <array sort>) takes one element argument", e)
            if args[0].sort != sort.args[1]:
                self.fail(f"constant array of {sort} filled with a {args[0].sort}", e)
            return T.mk_const_array(sort, args[0])
        if not isinstance(ident, Symbol):
            self.fail("malformed qualified identifier", e)
        cands = [f for f in self.table.lookup(ident.name)
                 if f.result == sort and f.params == tuple(a.sort for a in args)]
        if len(cands) != 1:
            self.fail(f"no unique {ident.name} of sort {sort}", e)
        return App(cands[0], args)

    def tester(self, ctor: SExpr, args, e) -> Term:
        if not isinstance(ctor, Symbol) or ctor.name not in self.table.constructors:
            self.fail(f"unknown constructor in tester", e)
        c = self.table.constructors[ctor.name]
        return self.apply(c.tester, args, e)

    def quantifier(self, e: SList, env) -> Term:
        if len(e) != 3 or not isinstance(e[1], SList) or not e[1].items:
            self.fail(f"malformed {e[0].name}", e)
        binders = []
        inner = dict(env)
        for b in e[1]:
            if not (isinstance(b, SList) and len(b) == 2 and isinstance(b[0], Symbol)):
                self.fail("malformed sorted variable", b)
            s = self.table.resolve_sort(b[1])
            binders.append((b[0].name, s))
            inner[b[0].name] = s
        body = self.check(e[2], inner)
        if body.sort != BOOL:
            self.fail(f"quantifier body has sort {body.sort}, expected Bool", e)
        return Quant(e[0].name, tuple(binders), body)

    def let(self, e: SList, env) -> Term:
        if len(e) != 3 or not isinstance(e[1], SList):
            self.fail("malformed let", e)
        bindings = []
        inner = dict(env)
        for b in e[1]:
            if not (isinstance(b, SList) and len(b) == 2 and isinstance(b[0], Symbol)):
                self.fail("malformed let binding", b)
            v = self.check(b[1], env)
            bindings.append((b[0].name, v))
            inner[b[0].name] = v.sort
        return Let(tuple(bindings), self.check(e[2], inner))

    # Applications -------------------------------------------------------------
    def apply(self, name: str, args: tuple, e) -> Term:
        sorts = tuple(a.sort for a in args)
        if name in _BOOL_NARY or name == "not":
            if name == "not" and len(args) != 1:
                self.fail("not takes one argument", e)
            if not args:
                self.fail(f"{name} needs arguments", e)
            for s in sorts:
                if s != BOOL:
                    self.fail(f"{name} expects Bool arguments, got {s}", e)
            return App(FunSym(name, CORE, sorts, BOOL), args)
        if name in ("=", "distinct"):
            if len(args) < 2:
                self.fail(f"{name} needs at least two arguments", e)
            if len(set(sorts)) != 1:
                self.fail(f"{name} applied to different sorts {sorts[0]} and "
                          f"{next(s for s in sorts if s != sorts[0])}", e)
            return App(FunSym(name, CORE, sorts, BOOL), args)
        if name == "ite":
            if len(args) != 3 or sorts[0] != BOOL or sorts[1] != sorts[2]:
                self.fail(f"ite expects (Bool, S, S), got {tuple(str(s) for s in sorts)}", e)
            return App(FunSym("ite", CORE, sorts, sorts[1]), args)
        if name in _ARITH_OPS:
            for s in sorts:
                if self.table.sorts.get(s.name) and self.table.sorts[s.name].kind == ADDRESS:
                    self.fail(f"arithmetic is not defined on address sort {s} "
                              f"(pointer arithmetic is excluded)", e)
                if s != INT:
                    self.fail(f"{name} expects Int arguments, got {s}", e)
            if name == "-" and len(args) == 1 and isinstance(args[0], Lit):
                return Lit(-args[0].value, INT)
            result = BOOL if name in ("<", "<=", ">", ">=") else INT
            return App(FunSym(name, ARITH, sorts, result), args)
        if name == "select":
            if len(args) != 2 or sorts[0].name != "Array" or sorts[0].args[0] != sorts[1]:
                self.fail("select expects (Array I E) and I", e)
            return App(FunSym("select", ARRAY, sorts, sorts[0].args[1]), args)
        if name == "store":
            if (len(args) != 3 or sorts[0].name != "Array" or sorts[0].args[0] != sorts[1]
                    or sorts[0].args[1] != sorts[2]):
                self.fail("store expects (Array I E), I and E", e)
            return App(FunSym("store", ARRAY, sorts, sorts[0]), args)
        cands = self.table.lookup(name)
        if not cands:
            self.fail(f"unknown function {name}", e)
        matching = [f for f in cands if f.params == sorts]
        if len(matching) == 1:
            return App(matching[0], args)
        if len(matching) > 1:
            self.fail(f"ambiguous application of {name}", e)
        same_arity = [f for f in cands if len(f.params) == len(sorts)]
        if len(same_arity) == 1:
            f = same_arity[0]
            for i, (want, got) in enumerate(zip(f.params, sorts)):
                if want != got:
                    self.fail(f"argument {i + 1} of {name} has sort {got}, expected {want}", e)
        ranks = "; ".join("(" + " ".join(str(p) for p in f.params) + ")" for f in cands)
        self.fail(f"no rank of {name} accepts ({' '.join(str(s) for s in sorts)}); "
                  f"available: {ranks}", e)


def typecheck_term(e: SExpr, table: SortTable, env: dict[str, Sort] | None = None) -> Term:
    """Annotate ``e`` with sorts; raise :class:`SortError` on ill-sorted input."""
    return _Checker(table).check(e, dict(env or {}))


# ---------------------------------------------------------------------------
# Whole scripts

@dataclass
class ElaboratedScript:
    table: SortTable
    commands: list
    assertions: list[Term] = field(default_factory=list)
    heaps: list[HeapSignature] = field(default_factory=list)
    constants: dict[str, Sort] = field(default_factory=dict)

    @property
    def heap(self) -> HeapSignature:
        if len(self.heaps) != 1:
            raise ElaborationError(f"expected exactly one heap declaration, found {len(self.heaps)}")
        return self.heaps[0]


def _param_list(e: SExpr, table: SortTable) -> list[tuple[str, Sort]]:
    if not isinstance(e, SList):
        raise ElaborationError("expected a parameter list", getattr(e, "span", None))
    out = []
    for p in e:
        if not (isinstance(p, SList) and len(p) == 2 and isinstance(p[0], Symbol)):
            raise ElaborationError("malformed sorted variable", getattr(p, "span", None))
        out.append((p[0].name, table.resolve_sort(p[1])))
    return out


def elaborate_command(cmd, script: ElaboratedScript, plain: bool = False) -> None:
    table = script.table
    if isinstance(cmd, OpaqueCommand):
        return
    name, args, span = cmd.name, cmd.args, cmd.span
    if isinstance(cmd, DeclareHeap):
        if plain:
            raise ElaborationError("declare-heap is not part of plain SMT-LIB", span)
        script.heaps.append(elaborate_heap_decl(cmd.decl, table, span))
    elif name == "declare-sort":
        arity = args[1].value if len(args) > 1 else 0
        if arity != 0:
            raise ElaborationError("parametric uninterpreted sorts are not supported", span)
        table.declare_sort(args[0].name, 0, UNINTERPRETED, span=span)
    elif name == "declare-datatype":
        declare_datatypes([(args[0].name, 0)], [args[1]], table, span)
    elif name == "declare-datatypes":
        decs = []
        for d in args[0]:
            if not (isinstance(d, SList) and len(d) == 2 and isinstance(d[0], Symbol)
                    and isinstance(d[1], Numeral)):
                raise ElaborationError("malformed sort declaration", span)
            decs.append((d[0].name, d[1].value))
        if len(decs) != len(args[1]):
            raise ElaborationError("declare-datatypes: sort/constructor list count mismatch", span)
        declare_datatypes(decs, list(args[1]), table, span)
    elif name in ("declare-fun", "declare-const"):
        if name == "declare-fun":
            if not isinstance(args[1], SList):
                raise ElaborationError("declare-fun expects a sort list", span)
            params = tuple(table.resolve_sort(s) for s in args[1])
            result = table.resolve_sort(args[2])
        else:
            params, result = (), table.resolve_sort(args[1])
        fs = FunSym(args[0].name, UF, params, result)
        table.add_function(fs, span)
        if not params:
            script.constants[fs.name] = result
    elif name == "define-fun":
        params = _param_list(args[1], table)
        result = table.resolve_sort(args[2])
        body = typecheck_term(args[3], table, dict(params))
        if body.sort != result:
            raise SortError(f"body of {args[0].name} has sort {body.sort}, declared {result}", span)
        fs = FunSym(args[0].name, DEFINED, tuple(s for _, s in params), result)
        table.add_function(fs, span)
        table.defines[fs.name] = (tuple(n for n, _ in params), body)
    elif name == "assert":
        t = typecheck_term(args[0], table)
        if t.sort != BOOL:
            raise SortError(f"assertion has sort {t.sort}, expected Bool", span)
        script.assertions.append(t)


def elaborate_script(commands: Iterable, plain: bool = False,
                     table: SortTable | None = None) -> ElaboratedScript:
    """Elaborate every declaration and type check every assertion, in order."""
    commands = list(commands)
    script = ElaboratedScript(table if table is not None else SortTable(), commands)
    for cmd in commands:
        elaborate_command(cmd, script, plain)
    return script


def elaborate_text(text: str, plain: bool = False) -> ElaboratedScript:
    from .frontend import parse_script
    return elaborate_script(parse_script(text), plain)
