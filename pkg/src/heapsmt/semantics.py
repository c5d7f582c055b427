"""Concrete semantics: finite heap values, term evaluation and the axiom battery.

Addresses are naturals with null = 0, and the i-th allocation from the empty
heap returns address i.  A heap is its allocation count plus the objects
stored at addresses 1..size; nothing else is represented, so two heaps are
equal exactly when the extensionality premise holds of them.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from . import terms as T
from .elaborator import (
    ADDRESS, ADT, ALLOC_RESULT, HEAP_SORT, UNINTERPRETED, HeapSignature, SortTable,
    elaborate_text,
)
from .errors import EvaluationError
from .terms import App, Let, Lit, Quant, Sort, Term, Var


# ---------------------------------------------------------------------------
# Values

@dataclass(frozen=True, order=True)
class Address:
    index: int

    def __repr__(self):
        return f"@{self.index}"


@dataclass(frozen=True)
class HeapValue:
    """``contents[i - 1]`` is the object at address ``i``.

    The canonical form has ``len(contents) == size``; the evaluator never
    builds anything else, but deliberately broken operations can.
    """

    size: int
    contents: tuple = ()

    @classmethod
    def of(cls, *objects) -> "HeapValue":
        return cls(len(objects), tuple(objects))

    def is_canonical(self) -> bool:
        return self.size >= 0 and len(self.contents) == self.size

    def __repr__(self):
        extra = "" if self.is_canonical() else f" size={self.size}"
        return f"Heap[{', '.join(map(repr, self.contents))}{extra}]"


@dataclass(frozen=True)
class AdtValue:
    ctor: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return self.ctor
        return f"({self.ctor} {' '.join(map(repr, self.args))})"


@dataclass(frozen=True)
class Element:
    """Element ``index`` of the finite universe of an uninterpreted sort."""

    sort: str
    index: int

    def __repr__(self):
        return f"{self.sort}!{self.index}"


@dataclass(frozen=True)
class ArrayValue:
    """Total map given by a default plus finitely many overriding entries."""

    default: Any
    entries: tuple = ()  # sorted (key, value) pairs, values differ from default

    @classmethod
    def make(cls, default, mapping: dict) -> "ArrayValue":
        items = sorted(((k, v) for k, v in mapping.items() if v != default), key=_sort_key)
        return cls(default, tuple(items))

    def select(self, key):
        for k, v in self.entries:
            if k == key:
                return v
        return self.default

    def store(self, key, value) -> "ArrayValue":
        m = dict(self.entries)
        m[key] = value
        return ArrayValue.make(self.default, m)


def _sort_key(item):
    return repr(item[0])


# ---------------------------------------------------------------------------
# Heap operations

class HeapOps:
    """The operations of one heap declaration over :class:`HeapValue`.

    Subclass and override a method to study a broken variant.
    """

    def __init__(self, def_obj, alloc_ctor: str):
        self._def_obj = def_obj
        self.alloc_ctor = alloc_ctor
        self.resolve = None  # computes defObj from the current assignment when it is not given

    @property
    def def_obj(self):
        if self._def_obj is None and self.resolve is not None:
            return self.resolve()
        return self._def_obj

    @def_obj.setter
    def def_obj(self, value):
        self._def_obj = value

    def empty(self) -> HeapValue:
        return HeapValue(0, ())

    def null(self) -> Address:
        return Address(0)

    def nth(self, i: int) -> Address:
        return Address(i)

    def valid(self, h: HeapValue, a: Address) -> bool:
        return 1 <= a.index <= h.size

    def read(self, h: HeapValue, a: Address):
        if self.valid(h, a):
            return h.contents[a.index - 1]
        return self.def_obj

    def write(self, h: HeapValue, a: Address, o) -> HeapValue:
        if not self.valid(h, a):
            return h
        c = list(h.contents)
        c[a.index - 1] = o
        return HeapValue(h.size, tuple(c))

    def allocate_pair(self, h: HeapValue, o) -> tuple[HeapValue, Address]:
        n = h.size + 1
        return HeapValue(n, tuple(h.contents[:h.size]) + (o,)), Address(n)

    def allocate(self, h: HeapValue, o) -> AdtValue:
        return AdtValue(self.alloc_ctor, self.allocate_pair(h, o))


def allocate_n(ops: HeapOps, n: int, obj=None) -> tuple[HeapValue, Address]:
    """``n`` allocations of ``obj`` (default: defObj) starting from the empty heap."""
    h, a = ops.empty(), ops.null()
    for _ in range(n):
        h, a = ops.allocate_pair(h, ops.def_obj if obj is None else obj)
    return h, a


# ---------------------------------------------------------------------------
# Interpretations

@dataclass
class FunctionTable:
    default: Any
    table: dict = field(default_factory=dict)  # tuple of argument values -> value

    def __call__(self, args: tuple):
        return self.table.get(tuple(args), self.default)


@dataclass
class Interpretation:
    """Values of free constants and functions plus the finite quantifier domains."""

    values: dict[str, Any] = field(default_factory=dict)
    functions: dict[str, FunctionTable] = field(default_factory=dict)
    universes: dict[str, int] = field(default_factory=dict)
    heap_bound: int = 3
    addr_bound: int = 5
    int_range: tuple[int, int] = (0, 3)
    adt_depth: int = 2
    domains: dict[Sort, list] = field(default_factory=dict)  # explicit overrides

    def copy(self) -> "Interpretation":
        return Interpretation(dict(self.values), dict(self.functions), dict(self.universes),
                              self.heap_bound, self.addr_bound, self.int_range,
                              self.adt_depth, dict(self.domains))


def value_to_json(v):
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, Address):
        return {"addr": v.index}
    if isinstance(v, HeapValue):
        out = {"size": v.size, "contents": [value_to_json(o) for o in v.contents]}
        return out
    if isinstance(v, AdtValue):
        return {"ctor": v.ctor, "args": [value_to_json(a) for a in v.args]}
    if isinstance(v, Element):
        return {"elem": [v.sort, v.index]}
    if isinstance(v, ArrayValue):
        return {"array": {"default": value_to_json(v.default),
                          "entries": [[value_to_json(k), value_to_json(x)] for k, x in v.entries]}}
    raise TypeError(f"no JSON form for {v!r}")


def value_from_json(j):
    if isinstance(j, (bool, int)):
        return j
    if isinstance(j, dict):
        if "addr" in j:
            return Address(int(j["addr"]))
        if "size" in j:
            contents = tuple(value_from_json(o) for o in j.get("contents", []))
            return HeapValue(int(j["size"]), contents)
        if "ctor" in j:
            return AdtValue(j["ctor"], tuple(value_from_json(a) for a in j.get("args", [])))
        if "elem" in j:
            return Element(j["elem"][0], int(j["elem"][1]))
        if "array" in j:
            a = j["array"]
            return ArrayValue.make(value_from_json(a["default"]),
                                   {value_from_json(k): value_from_json(v) for k, v in a["entries"]})
    raise EvaluationError(f"malformed value in interpretation: {j!r}")


def interpretation_to_json(m: Interpretation) -> dict:
    return {
        "v": 1,
        "universes": dict(sorted(m.universes.items())),
        "values": {k: value_to_json(v) for k, v in sorted(m.values.items())},
        "functions": {
            k: {"default": value_to_json(f.default),
                "table": [[[value_to_json(a) for a in args], value_to_json(v)]
                          for args, v in f.table.items()]}
            for k, f in sorted(m.functions.items())
        },
    }


def interpretation_from_json(j: dict) -> Interpretation:
    if j.get("v") != 1:
        raise EvaluationError(f"unsupported interpretation schema version {j.get('v')!r}")
    m = Interpretation()
    m.universes = {k: int(v) for k, v in j.get("universes", {}).items()}
    m.values = {k: value_from_json(v) for k, v in j.get("values", {}).items()}
    for name, f in j.get("functions", {}).items():
        table = {tuple(value_from_json(a) for a in args): value_from_json(v)
                 for args, v in f.get("table", [])}
        m.functions[name] = FunctionTable(value_from_json(f["default"]), table)
    return m


def dumps_interpretation(m: Interpretation) -> str:
    return json.dumps(interpretation_to_json(m), sort_keys=False)


def format_value(v) -> str:
    return repr(v)


# ---------------------------------------------------------------------------
# Evaluation

class Evaluator:
    def __init__(self, table: SortTable, interp: Interpretation | None = None,
                 heap_ops: dict[str, HeapOps] | None = None):
        self.table = table
        self.interp = interp if interp is not None else Interpretation()
        self._domain_cache: dict[Sort, list] = {}
        self.ops: dict[str, HeapOps] = {}
        for name, sig in table.heaps.items():
            ops = (heap_ops or {}).get(name) or HeapOps(None, sig.alloc_ctor)
            self.ops[name] = ops
            if ops._def_obj is None:
                ops.resolve = (lambda t: lambda: self.eval(t))(sig.def_obj)

    # Designated values for underspecified selectors ----------------------------
    def designated(self, sort: Sort, seen: frozenset = frozenset()):
        if sort == T.BOOL:
            return False
        if sort == T.INT:
            return 0
        if sort.name == "Array":
            return ArrayValue(self.designated(sort.args[1], seen))
        kind = self.table.sorts[sort.name].kind
        if kind == UNINTERPRETED:
            return Element(sort.name, 0)
        if kind == ADDRESS:
            return Address(0)
        if kind == HEAP_SORT:
            return HeapValue(0, ())
        dt = self.table.datatypes[sort.name]
        for c in dt.constructors:
            fields = [s for _, s in c.fields]
            if any(s.name in seen | {sort.name} for s in fields if s.name in self.table.datatypes):
                continue
            return AdtValue(c.name, tuple(self.designated(s, seen | {sort.name}) for s in fields))
        raise EvaluationError(f"datatype {sort} has no finite designated value")

    # Quantifier domains ----------------------------------------------------------
    def domain(self, sort: Sort) -> list:
        if sort in self.interp.domains:
            return self.interp.domains[sort]
        if sort not in self._domain_cache:
            self._domain_cache[sort] = self._domain(sort, self.interp.adt_depth)
        return self._domain_cache[sort]

    def _domain(self, sort: Sort, depth: int) -> list:
        m = self.interp
        if sort in m.domains:
            return m.domains[sort]
        if sort == T.BOOL:
            return [False, True]
        if sort == T.INT:
            return list(range(m.int_range[0], m.int_range[1] + 1))
        if sort.name == "Array":
            raise EvaluationError(f"cannot quantify over array sort {sort}")
        info = self.table.sorts.get(sort.name)
        if info is None:
            raise EvaluationError(f"unknown sort {sort}")
        if info.kind == UNINTERPRETED:
            if sort.name not in m.universes:
                raise EvaluationError(f"no universe given for sort {sort}")
            return [Element(sort.name, i) for i in range(m.universes[sort.name])]
        if info.kind == ADDRESS:
            return [Address(i) for i in range(m.addr_bound + 1)]
        if info.kind == HEAP_SORT:
            sig = self.table.heaps[info.owner]
            objs = self.domain(sig.object_sort)
            return [HeapValue(n, c) for n in range(m.heap_bound + 1)
                    for c in itertools.product(objs, repeat=n)]
        if info.kind == ALLOC_RESULT:
            sig = self.table.heaps[info.owner]
            return [AdtValue(sig.alloc_ctor, (h, a)) for h in self.domain(sig.heap_sort)
                    for a in self.domain(sig.address_sort)]
        dt = self.table.datatypes[sort.name]
        out = []
        for c in dt.constructors:
            field_domains = []
            for _, s in c.fields:
                if s.name in self.table.datatypes and self.table.sorts[s.name].kind == ADT:
                    field_domains.append(self._domain(s, depth - 1) if depth > 0 else [])
                else:
                    field_domains.append(self.domain(s))
            out.extend(AdtValue(c.name, args) for args in itertools.product(*field_domains))
        return out

    # Terms -------------------------------------------------------------------------
    def eval(self, t: Term, env: dict | None = None):
        return self._eval(t, env or {})

    def _eval(self, t: Term, env: dict):
        if isinstance(t, Lit):
            return t.value
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvaluationError(f"unbound variable {t.name}") from None
        if isinstance(t, Quant):
            return self._quant(t, env)
        if isinstance(t, Let):
            inner = dict(env)
            for n, v in t.bindings:
                inner[n] = self._eval(v, env)
            return self._eval(t.body, inner)
        fn = t.fn
        kind = fn.kind
        name = fn.name
        if kind == T.CORE:
            return self._core(name, t.args, env)
        args = [self._eval(a, env) for a in t.args]
        if kind == T.HEAP:
            ops = self.ops[fn.owner]
            op = fn.op
            if op == "read":
                return ops.read(*args)
            if op == "write":
                return ops.write(*args)
            if op == "allocate":
                return ops.allocate(*args)
            if op == "valid":
                return ops.valid(*args)
            if op == "empty":
                return ops.empty()
            if op == "null":
                return ops.null()
            return ops.nth(fn.index)
        if kind == T.CTOR:
            return AdtValue(name, tuple(args))
        if kind == T.SEL:
            v = args[0]
            if v.ctor == fn.op:
                return v.args[fn.index]
            return self.designated(fn.result)
        if kind == T.TEST:
            return args[0].ctor == fn.op
        if kind == T.ARITH:
            return _arith(name, args)
        if kind == T.ARRAY:
            if name == "select":
                return args[0].select(args[1])
            if name == "store":
                return args[0].store(args[1], args[2])
            return ArrayValue(args[0])
        if kind == T.DEFINED:
            params, body = self.table.defines[name]
            return self._eval(body, dict(zip(params, args)))
        if kind == T.UF:
            if not fn.params:
                try:
                    return self.interp.values[name]
                except KeyError:
                    raise EvaluationError(f"constant {name} is not assigned") from None
            f = self.interp.functions.get(name)
            if f is None:
                raise EvaluationError(f"function {name} is not interpreted")
            return f(tuple(args))
        raise EvaluationError(f"cannot evaluate symbol {name}")

    def _core(self, name: str, args, env):
        ev = self._eval
        if name == "and":
            return all(ev(a, env) for a in args)
        if name == "or":
            return any(ev(a, env) for a in args)
        if name == "not":
            return not ev(args[0], env)
        if name == "=>":
            vals = args
            result = ev(vals[-1], env)
            for a in reversed(vals[:-1]):
                result = (not ev(a, env)) or result
            return result
        if name == "xor":
            r = False
            for a in args:
                r = r != ev(a, env)
            return r
        if name == "ite":
            return ev(args[1], env) if ev(args[0], env) else ev(args[2], env)
        vals = [ev(a, env) for a in args]
        if name == "=":
            return all(v == vals[0] for v in vals[1:])
        if name == "distinct":
            return all(vals[i] != vals[j] for i in range(len(vals)) for j in range(i + 1, len(vals)))
        raise EvaluationError(f"unknown core operator {name}")

    def _quant(self, t: Quant, env):
        names = [n for n, _ in t.binders]
        domains = [self.domain(s) for _, s in t.binders]
        want = t.kind == "exists"
        for combo in itertools.product(*domains):
            inner = dict(env)
            inner.update(zip(names, combo))
            if bool(self._eval(t.body, inner)) == want:
                return want
        return not want


def _arith(name, args):
    if name == "+":
        return sum(args)
    if name == "-":
        if len(args) == 1:
            return -args[0]
        r = args[0]
        for a in args[1:]:
            r -= a
        return r
    if name == "*":
        r = 1
        for a in args:
            r *= a
        return r
    if name in ("div", "mod"):
        a, b = args
        if b == 0:
            return 0
        q = a // b if b > 0 else -(a // -b)  # Euclidean: remainder is non-negative
        if a - b * q < 0:
            q += 1 if b < 0 else -1
        return q if name == "div" else a - b * q
    if name == "abs":
        return abs(args[0])
    a, b = args
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[name]


def evaluate(t: Term, table: SortTable, interp: Interpretation | None = None):
    return Evaluator(table, interp).eval(t)


# ---------------------------------------------------------------------------
# Axioms

AXIOMS = ("row1", "row2", "ext", "roa1", "roa2", "alloc1", "alloc2",
          "ivwt", "ivrd", "vld1", "vld2", "cons")


@dataclass(frozen=True)
class Bounds:
    heap_size: int = 3
    objects: int = 3
    address: int = 5

    @classmethod
    def parse(cls, text: str) -> "Bounds":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bounds must look like h:o:a, got {text!r}")
        h, o, a = (int(p) for p in parts)
        if h < 0 or o < 1 or a < 0:
            raise ValueError("bounds must be non-negative (object universe at least 1)")
        return cls(h, o, a)

    def __str__(self):
        return f"{self.heap_size}:{self.objects}:{self.address}"


def battery_script(objects: int) -> str:
    ctors = " ".join(f"(O{i})" for i in range(objects))
    return f"(declare-heap Heap Addr Obj O0 ((Obj 0)) (({ctors})))"


def battery_signature(objects: int = 3) -> tuple[SortTable, HeapSignature]:
    """A heap over an object sort with exactly ``objects`` values, O0 being defObj."""
    s = elaborate_text(battery_script(objects))
    return s.table, s.heap


def _iff(a: Term, b: Term) -> Term:
    return T.mk_eq(a, b)


def _neq(a: Term, b: Term) -> Term:
    return T.mk_not(T.mk_eq(a, b))


def axiom_formula(sig: HeapSignature, name: str) -> Term:
    """The universal closure of one axiom as a typed formula.

    ``cons`` is second order and has no formula; it is checked separately.
    """
    H, A, O, AR = sig.heap_sort, sig.address_sort, sig.object_sort, sig.alloc_result_sort
    h, h1, h2 = Var("h", H), Var("h1", H), Var("h2", H)
    p, p1, p2 = Var("p", A), Var("p1", A), Var("p2", A)
    o, o1, o2 = Var("o", O), Var("o1", O), Var("o2", O)
    ar = Var("ar", AR)
    imp, eq, not_, and_ = T.mk_implies, T.mk_eq, T.mk_not, T.mk_and
    fa = T.mk_forall
    if name == "row1":
        return fa([("h", H), ("p", A), ("o", O)],
                  imp(sig.valid(h, p), eq(sig.read(sig.write(h, p, o), p), o)))
    if name == "row2":
        return fa([("h", H), ("p1", A), ("p2", A), ("o", O)],
                  imp(_neq(p1, p2), eq(sig.read(sig.write(h, p1, o), p2), sig.read(h, p2))))
    if name == "ext":
        same = fa([("p", A)], and_(_iff(sig.valid(h1, p), sig.valid(h2, p)),
                                   eq(sig.read(h1, p), sig.read(h2, p))))
        return fa([("h1", H), ("h2", H)], imp(same, eq(h1, h2)))
    if name == "roa1":
        return fa([("h", H), ("o", O), ("ar", AR)],
                  imp(eq(sig.allocate(h, o), ar), eq(sig.read(sig.first(ar), sig.second(ar)), o)))
    if name == "roa2":
        return fa([("h", H), ("o", O), ("ar", AR), ("p", A)],
                  imp(and_(eq(sig.allocate(h, o), ar), _neq(p, sig.second(ar))),
                      eq(sig.read(sig.first(ar), p), sig.read(h, p))))
    if name == "alloc1":
        rest = fa([("p", A)], imp(_neq(sig.second(ar), p),
                                  _iff(sig.valid(h, p), sig.valid(sig.first(ar), p))))
        return fa([("h", H), ("o", O), ("ar", AR)],
                  imp(eq(sig.allocate(h, o), ar),
                      and_(not_(sig.valid(h, sig.second(ar))),
                           sig.valid(sig.first(ar), sig.second(ar)), rest)))
    if name == "alloc2":
        same = fa([("p", A)], _iff(sig.valid(h1, p), sig.valid(h2, p)))
        return fa([("h1", H), ("h2", H), ("o1", O), ("o2", O)],
                  imp(same, eq(sig.second(sig.allocate(h1, o1)), sig.second(sig.allocate(h2, o2)))))
    if name == "ivwt":
        return fa([("h", H), ("p", A), ("o", O)],
                  imp(not_(sig.valid(h, p)), eq(sig.write(h, p, o), h)))
    if name == "ivrd":
        return fa([("h", H), ("p", A)], imp(not_(sig.valid(h, p)), eq(sig.read(h, p), sig.def_obj)))
    if name == "vld1":
        return fa([("p", A)], not_(sig.valid(sig.empty(), p)))
    if name == "vld2":
        return fa([("h", H)], not_(sig.valid(h, sig.null())))
    raise KeyError(name)


@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    counterexample: dict | None = None
    checked: int = 0
    note: str = ""

    def to_json(self) -> dict:
        cex = None
        if self.counterexample is not None:
            cex = {k: value_to_json(v) for k, v in self.counterexample.items()}
        return {"axiom": self.axiom, "pass": self.passed, "counterexample": cex,
                "checked": self.checked}


def find_counterexample(ev: Evaluator, formula: Term,
                        domains: dict[str, list] | None = None) -> tuple[dict | None, int]:
    """Enumerate the outermost universal binders of ``formula``.

    Returns the first falsifying binding (or None) and the number of
    instances evaluated.  ``domains`` overrides the domain per binder name.
    """
    binders: list = []
    body = formula
    while isinstance(body, Quant) and body.kind == "forall":
        binders.extend(body.binders)
        body = body.body
    names = [n for n, _ in binders]
    doms = [(domains or {}).get(n) or ev.domain(s) for n, s in binders]
    count = 0
    for combo in itertools.product(*doms):
        count += 1
        env = dict(zip(names, combo))
        if not ev.eval(body, env):
            return env, count
    return None, count


def write_closure(ops: HeapOps, heaps: Iterable, addresses: Iterable, objects: Iterable) -> list:
    """``heaps`` together with every heap one ``write`` away from them."""
    out = list(dict.fromkeys(heaps))
    seen = set(out)
    addresses, objects = list(addresses), list(objects)
    for h in list(out):
        for a in addresses:
            for o in objects:
                w = ops.write(h, a, o)
                if w not in seen:
                    seen.add(w)
                    out.append(w)
    return out


def check_cons(ops: HeapOps, heaps: list, addresses: list, bound: int) -> tuple[bool, dict | None, int]:
    """Check the no-junk axiom with the canonical witness.

    f(i) is i allocations of defObj from the empty heap and g(i) is address i.
    The chain conjuncts are verified for i < ``bound`` and every address in
    ``addresses`` must equal some g(i) with i <= ``bound``.
    """
    checked = 0
    f = [ops.empty()]
    g = [ops.null()]
    for i in range(bound):
        h2, a2 = ops.allocate_pair(f[i], ops.def_obj)
        f.append(h2)
        g.append(a2)
    checked += 1
    if f[0] != ops.empty() or g[0] != ops.null():
        return False, {"i": 0}, checked
    for i in range(bound):
        checked += 1
        if g[i + 1] != Address(i + 1):
            return False, {"i": i + 1, "g": g[i + 1]}, checked
    for p in addresses:
        checked += 1
        if p not in g:
            return False, {"p": p}, checked
    return True, None, checked


def check_axiom(axiom: str, bounds: Bounds = Bounds(), ops: HeapOps | None = None) -> AxiomResult:
    """Exhaustively check one axiom over the heaps, objects and addresses within ``bounds``."""
    table, sig = battery_signature(bounds.objects)
    interp = Interpretation(heap_bound=bounds.heap_size, addr_bound=bounds.address)
    ev = Evaluator(table, interp, {sig.name: ops} if ops is not None else None)
    ops = ev.ops[sig.name]
    heaps = ev.domain(sig.heap_sort)
    addresses = ev.domain(sig.address_sort)
    if axiom == "cons":
        ok, cex, n = check_cons(ops, heaps, addresses, bounds.address)
        return AxiomResult(axiom, ok, cex, n)
    domains = None
    if axiom == "ext":
        closed = write_closure(ops, heaps, addresses, ev.domain(sig.object_sort))
        domains = {"h1": closed, "h2": closed}
    cex, n = find_counterexample(ev, axiom_formula(sig, axiom), domains)
    return AxiomResult(axiom, cex is None, cex, n)


def run_battery(bounds: Bounds = Bounds(), ops: HeapOps | None = None,
                axioms: Iterable[str] = AXIOMS) -> list[AxiomResult]:
    return [check_axiom(a, bounds, ops) for a in axioms]
