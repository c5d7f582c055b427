"""Quantifier-free conjunctions of heap literals and their purified form.

Purification names every heap, address and object subterm with a node and
records one flat constraint per operation.  Fresh node names start with
``#``, which cannot occur in an SMT-LIB simple symbol.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .. import terms as T
from ..elaborator import (
    ADDRESS, ALLOC_RESULT, HEAP_SORT, UNINTERPRETED, ElaboratedScript, HeapSignature,
    SortTable, elaborate_text,
)
from ..errors import FragmentError
from ..terms import App, Lit, Quant, Let, Sort, Term, Var


@dataclass
class Conjunction:
    """A list of literals over a single heap declaration."""

    table: SortTable
    sig: HeapSignature
    literals: list[Term] = field(default_factory=list)

    def formula(self) -> Term:
        return T.mk_and(*self.literals)

    def constants(self) -> dict[str, Sort]:
        out: dict[str, Sort] = dict(T.constants(self.sig.def_obj))
        for lit in self.literals:
            out.update(T.constants(lit))
        return out

    def extend(self, literals) -> "Conjunction":
        return Conjunction(self.table, self.sig, self.literals + list(literals))


def _split(t: Term) -> Iterator[Term]:
    if isinstance(t, App) and t.fn.kind == T.CORE and t.fn.name == "and":
        for a in t.args:
            yield from _split(a)
    elif t != T.TRUE:
        yield t


def conjunction_from_script(script: ElaboratedScript) -> Conjunction:
    if len(script.heaps) != 1:
        raise FragmentError(f"the solver handles exactly one heap declaration, "
                            f"found {len(script.heaps)}")
    lits = [l for a in script.assertions for l in _split(a)]
    return Conjunction(script.table, script.heap, lits)


def conjunction_from_text(text: str) -> Conjunction:
    return conjunction_from_script(elaborate_text(text))


# ---------------------------------------------------------------------------
# Flat constraints

@dataclass(frozen=True)
class EmptyEq:
    h: str


@dataclass(frozen=True)
class WriteEq:
    dst: str
    src: str
    a: str
    o: str


@dataclass(frozen=True)
class AllocEq:
    dst: str
    a: str
    src: str
    o: str


@dataclass(frozen=True)
class ReadEq:
    h: str
    a: str
    o: str


@dataclass(frozen=True)
class Nth:
    a: str
    index: int


@dataclass(frozen=True)
class Validity:
    h: str
    a: str
    positive: bool


@dataclass(frozen=True)
class HeapEq:
    h1: str
    h2: str
    positive: bool


@dataclass(frozen=True)
class SizeDiff:
    h1: str
    h2: str


@dataclass(frozen=True)
class AddrEq:
    a: str
    b: str
    positive: bool


@dataclass(frozen=True)
class ObjEq:
    o1: str
    o2: str
    positive: bool


@dataclass(frozen=True)
class ObjAtom:
    """Heap-free literal over object nodes (written as variables)."""

    term: Term
    positive: bool


@dataclass(frozen=True)
class Alternatives:
    branches: tuple  # tuple of tuples of constraints


@dataclass
class Purified:
    sig: HeapSignature
    table: SortTable
    mode: str  # "uninterpreted" | "enumerated"
    heaps: list[str] = field(default_factory=list)
    addrs: list[str] = field(default_factory=list)
    objs: list[str] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    heap_consts: list[str] = field(default_factory=list)
    addr_consts: list[str] = field(default_factory=list)
    obj_consts: list[str] = field(default_factory=list)
    pair_consts: dict[str, tuple[str, str]] = field(default_factory=dict)
    def_node: str = ""

    def expansions(self) -> Iterator[list]:
        """Every way of choosing one branch per :class:`Alternatives`."""
        yield from _expand(self.constraints)


def _expand(cs) -> Iterator[list]:
    plain = [c for c in cs if not isinstance(c, Alternatives)]
    alts = [c for c in cs if isinstance(c, Alternatives)]
    if not alts:
        yield plain
        return
    first, rest = alts[0], alts[1:]
    for branch in first.branches:
        for tail in _expand(list(branch) + rest):
            yield plain + tail


class _Purifier:
    def __init__(self, conj: Conjunction):
        self.sig = conj.sig
        self.table = conj.table
        kind = self.table.sorts[self.sig.object_sort.name].kind
        self.mode = "uninterpreted" if kind == UNINTERPRETED else "enumerated"
        self.p = Purified(self.sig, self.table, self.mode)
        self.memo: dict[Term, object] = {}
        self.counter = itertools.count(1)

    def fresh(self, kind: str) -> str:
        name = f"#{kind}{next(self.counter)}"
        {"h": self.p.heaps, "a": self.p.addrs, "o": self.p.objs}[kind].append(name)
        return name

    def sort_kind(self, s: Sort) -> str:
        if s == self.sig.object_sort:
            return "object"
        info = self.table.sorts.get(s.name)
        if info is not None and info.owner:
            if info.owner != self.sig.name:
                raise FragmentError(f"sort {s} belongs to another heap")
            return {HEAP_SORT: "heap", ADDRESS: "address", ALLOC_RESULT: "pair"}[info.kind]
        return "other"

    def is_const(self, t: Term) -> bool:
        return isinstance(t, App) and t.fn.kind == T.UF and not t.fn.params

    # Terms ---------------------------------------------------------------------
    def heap(self, t: Term) -> str:
        if t in self.memo:
            return self.memo[t]
        p = self.p
        if self.is_const(t):
            name = t.fn.name
            p.heaps.append(name)
            p.heap_consts.append(name)
        elif isinstance(t, App) and t.fn.kind == T.HEAP and t.fn.op == "empty":
            name = self.fresh("h")
            p.constraints.append(EmptyEq(name))
        elif isinstance(t, App) and t.fn.kind == T.HEAP and t.fn.op == "write":
            src, a, o = self.heap(t.args[0]), self.addr(t.args[1]), self.obj(t.args[2])
            name = self.fresh("h")
            p.constraints.append(WriteEq(name, src, a, o))
        elif isinstance(t, App) and t.fn.kind == T.SEL and t.fn.index == 0:
            name = self.pair(t.args[0])[0]
        else:
            raise FragmentError(f"heap term outside the fragment: {_show(t)}")
        self.memo[t] = name
        return name

    def addr(self, t: Term) -> str:
        if t in self.memo:
            return self.memo[t]
        p = self.p
        if self.is_const(t):
            name = t.fn.name
            p.addrs.append(name)
            p.addr_consts.append(name)
        elif isinstance(t, App) and t.fn.kind == T.HEAP and t.fn.op in ("null", "nth"):
            name = self.fresh("a")
            p.constraints.append(Nth(name, 0 if t.fn.op == "null" else t.fn.index))
        elif isinstance(t, App) and t.fn.kind == T.SEL and t.fn.owner == self.sig.alloc_result_sort.name:
            name = self.pair(t.args[0])[1]
        else:
            raise FragmentError(f"address term outside the fragment (addresses stored in "
                                f"objects are not supported): {_show(t)}")
        self.memo[t] = name
        return name

    def pair(self, t: Term) -> tuple[str, str]:
        if t in self.memo:
            return self.memo[t]
        p = self.p
        if self.is_const(t):
            h, a = f"#{t.fn.name}.1", f"#{t.fn.name}.2"
            p.heaps.append(h)
            p.addrs.append(a)
            p.pair_consts[t.fn.name] = (h, a)
            out = (h, a)
        elif isinstance(t, App) and t.fn.kind == T.HEAP and t.fn.op == "allocate":
            src, o = self.heap(t.args[0]), self.obj(t.args[1])
            out = (self.fresh("h"), self.fresh("a"))
            p.constraints.append(AllocEq(out[0], out[1], src, o))
        elif isinstance(t, App) and t.fn.kind == T.CTOR and t.fn.name == self.sig.alloc_ctor:
            out = (self.heap(t.args[0]), self.addr(t.args[1]))
        else:
            raise FragmentError(f"allocation-result term outside the fragment: {_show(t)}")
        self.memo[t] = out
        return out

    def obj(self, t: Term) -> str:
        if t in self.memo:
            return self.memo[t]
        p = self.p
        if self.is_const(t):
            name = t.fn.name
            p.objs.append(name)
            p.obj_consts.append(name)
        elif isinstance(t, App) and t.fn.kind == T.HEAP and t.fn.op == "read":
            h, a = self.heap(t.args[0]), self.addr(t.args[1])
            name = self.fresh("o")
            p.constraints.append(ReadEq(h, a, name))
        elif self.mode == "enumerated":
            inner = self.inner(t)
            name = self.fresh("o")
            p.constraints.append(ObjAtom(T.mk_eq(Var(name, t.sort), inner), True))
        else:
            raise FragmentError(f"object term outside the fragment: {_show(t)}")
        self.memo[t] = name
        return name

    def inner(self, t: Term) -> Term:
        """Object-level term with reads and object constants replaced by node variables."""
        if isinstance(t, Lit):
            return t
        if isinstance(t, App):
            k = self.sort_kind(t.sort)
            if k == "object" and (self.is_const(t) or (t.fn.kind == T.HEAP and t.fn.op == "read")):
                return Var(self.obj(t), t.sort)
            if k != "object" and k != "other":
                raise FragmentError(f"{k} term inside an object term: {_show(t)}")
            if self.is_const(t) or t.fn.kind in (T.UF, T.DEFINED):
                raise FragmentError(f"free symbol {t.fn.name} of sort {t.sort} inside an object term")
            if t.fn.kind == T.CORE and t.fn.name not in ("=", "distinct", "not", "and", "or", "ite"):
                raise FragmentError(f"operator {t.fn.name} inside an object term")
            return App(t.fn, tuple(self.inner(a) for a in t.args))
        raise FragmentError(f"quantified or let-bound object term: {_show(t)}")

    # Literals -------------------------------------------------------------------
    def literal(self, t: Term, positive: bool = True) -> None:
        p = self.p
        if isinstance(t, Lit):
            if bool(t.value) != positive:
                p.constraints.append(Alternatives(()))
            return
        if isinstance(t, (Quant, Let)):
            raise FragmentError("quantifiers and let are outside the quantifier-free fragment")
        fn = t.fn
        if fn.kind == T.CORE and fn.name == "not":
            return self.literal(t.args[0], not positive)
        if fn.kind == T.CORE and fn.name == "and" and positive:
            for a in t.args:
                self.literal(a)
            return
        if fn.kind == T.HEAP and fn.op == "valid":
            p.constraints.append(Validity(self.heap(t.args[0]), self.addr(t.args[1]), positive))
            return
        if fn.kind == T.TEST and fn.owner == self.sig.alloc_result_sort.name:
            self.pair(t.args[0])
            if not positive:
                p.constraints.append(Alternatives(()))
            return
        if fn.kind == T.CORE and fn.name in ("=", "distinct"):
            kind = self.sort_kind(t.args[0].sort)
            if kind != "other":
                if fn.name == "=":
                    pairs = list(zip(t.args, t.args[1:]))
                    if positive:
                        for a, b in pairs:
                            self.equal(kind, a, b, True)
                    else:
                        # not (a = b = c): some adjacent pair differs
                        branches = []
                        for a, b in pairs:
                            sub = _Scoped(self)
                            sub.equal(kind, a, b, False)
                            branches.append(tuple(sub.collected))
                        self.add_or(branches)
                    return
                pairs = list(itertools.combinations(t.args, 2))
                if positive:
                    for a, b in pairs:
                        self.equal(kind, a, b, False)
                else:
                    branches = []
                    for a, b in pairs:
                        sub = _Scoped(self)
                        sub.equal(kind, a, b, True)
                        branches.append(tuple(sub.collected))
                    self.add_or(branches)
                return
        if self.mode == "enumerated":
            p.constraints.append(ObjAtom(self.inner(t), positive))
            return
        raise FragmentError(f"literal outside the fragment: {_show(t)}")

    def add_or(self, branches) -> None:
        if len(branches) == 1:
            self.p.constraints.extend(branches[0])
        else:
            self.p.constraints.append(Alternatives(tuple(branches)))

    def equal(self, kind: str, a: Term, b: Term, positive: bool) -> None:
        p = self.p
        if kind == "heap":
            h1, h2 = self.heap(a), self.heap(b)
            if positive:
                p.constraints.append(HeapEq(h1, h2, True))
            else:
                p.constraints.append(self.heap_diseq(h1, h2))
        elif kind == "address":
            p.constraints.append(AddrEq(self.addr(a), self.addr(b), positive))
        elif kind == "object":
            p.constraints.append(ObjEq(self.obj(a), self.obj(b), positive))
        elif kind == "pair":
            (h1, a1), (h2, a2) = self.pair(a), self.pair(b)
            if positive:
                p.constraints += [HeapEq(h1, h2, True), AddrEq(a1, a2, True)]
            else:
                p.constraints.append(Alternatives(((self.heap_diseq(h1, h2),),
                                                   (AddrEq(a1, a2, False),))))

    def heap_diseq(self, h1: str, h2: str) -> Alternatives:
        """h1 != h2: their sizes differ, or some address valid in h1 reads differently."""
        k = self.fresh("a")
        r1, r2 = self.fresh("o"), self.fresh("o")
        return Alternatives((
            (SizeDiff(h1, h2),),
            (Validity(h1, k, True), ReadEq(h1, k, r1), ReadEq(h2, k, r2), ObjEq(r1, r2, False)),
        ))


class _Scoped:
    """Collects the constraints one sub-literal adds, for use inside a disjunction."""

    def __init__(self, parent: _Purifier):
        self.parent = parent
        self.collected: list = []

    def equal(self, kind, a, b, positive):
        cs = self.parent.p.constraints
        mark = len(cs)
        self.parent.equal(kind, a, b, positive)
        # definitional constraints for subterms stay global; only the new
        # (dis)equality itself moves into the branch
        new = cs[mark:]
        del cs[mark:]
        defs = [c for c in new if isinstance(c, (EmptyEq, WriteEq, AllocEq, ReadEq, Nth))
                or (isinstance(c, ObjAtom) and c.positive and _is_definition(c))]
        rest = [c for c in new if c not in defs]
        cs.extend(defs)
        self.collected.extend(rest)


def _is_definition(c: ObjAtom) -> bool:
    t = c.term
    return (isinstance(t, App) and t.fn.name == "=" and isinstance(t.args[0], Var)
            and t.args[0].name.startswith("#"))


def purify(conj: Conjunction) -> Purified:
    """Flatten ``conj`` into node-level constraints; raise FragmentError when out of fragment."""
    pu = _Purifier(conj)
    p = pu.p
    def_term = conj.sig.def_obj
    p.def_node = pu.obj(def_term)
    for lit in conj.literals:
        if lit.sort != T.BOOL:
            raise FragmentError("literal is not Boolean")
        pu.literal(lit)
    # keep node lists duplicate-free, in first-seen order
    p.heaps = list(dict.fromkeys(p.heaps))
    p.addrs = list(dict.fromkeys(p.addrs))
    p.objs = list(dict.fromkeys(p.objs))
    p.heap_consts = list(dict.fromkeys(p.heap_consts))
    p.addr_consts = list(dict.fromkeys(p.addr_consts))
    p.obj_consts = list(dict.fromkeys(p.obj_consts))
    return p


def _show(t: Term) -> str:
    from ..sexpr import to_text
    return to_text(T.term_to_sexpr(t))
