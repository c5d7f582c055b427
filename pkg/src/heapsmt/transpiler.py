"""Lowering of heap scripts to plain SMT-LIB over arrays, datatypes and integers.

Each heap becomes a record of an allocation counter and an ``Int``-indexed
array of objects; addresses become integers.  Two corrections on top of the
naive array encoding are switchable: a ``heapEq`` predicate that ignores
unallocated cells, and well-formedness guards that keep counters and
addresses non-negative and unallocated cells at the default object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import terms as T
from .elaborator import (
    ADDRESS, ALLOC_RESULT, HEAP_SORT, ElaboratedScript, HeapSignature, SortTable,
    elaborate_command, elaborate_script, mangle_names, typecheck_term,
)
from .errors import TranspileError
from .frontend import Command, DeclareHeap, OpaqueCommand, parse_script, print_script
from .semantics import (
    AXIOMS, Address, AdtValue, ArrayValue, AxiomResult, Bounds, Evaluator, HeapValue,
    Interpretation, axiom_formula, battery_script, find_counterexample,
)
from .sexpr import Numeral, SExpr, SList, Symbol, slist, sym
from .terms import App, Let, Lit, Quant, Sort, Term, Var


@dataclass(frozen=True)
class TranspileConfig:
    emit_heap_eq: bool = True
    emit_wf_guards: bool = True
    prefix: str = "hp_"
    # constant array filled with defObj for the empty heap, instead of an
    # uninitialised declared array
    const_empty_array: bool = True

    @classmethod
    def uncorrected(cls, prefix: str = "hp_") -> "TranspileConfig":
        return cls(False, False, prefix, False)


@dataclass(frozen=True)
class HeapNames:
    record: str
    ctor: str
    size: str
    contents: str
    alloc_result: str
    alloc_ctor: str
    first: str
    second: str
    valid: str
    read: str
    write: str
    allocate: str
    empty: str
    heap_eq: str
    wf: str
    init_array: str

    @classmethod
    def make(cls, heap: str, prefix: str) -> "HeapNames":
        p = prefix
        return cls(
            record=f"{p}{heap}", ctor=f"{p}{heap}Ctor", size=f"{p}size_{heap}",
            contents=f"{p}contents_{heap}", alloc_result=f"{p}AllocationResult{heap}",
            alloc_ctor=f"{p}AllocResult{heap}", first=f"{p}1_{heap}", second=f"{p}2_{heap}",
            valid=f"{p}valid_{heap}", read=f"{p}read_{heap}", write=f"{p}write_{heap}",
            allocate=f"{p}allocate_{heap}", empty=f"{p}empty{heap}",
            heap_eq=f"{p}heapEq_{heap}", wf=f"{p}wf_{heap}", init_array=f"{p}initArray_{heap}",
        )

    def all(self) -> list[str]:
        return list(self.__dict__.values())


@dataclass
class RewriteMap:
    """Where every heap-theory sort and symbol goes in the output vocabulary."""

    source: SortTable
    target: SortTable = field(default_factory=SortTable)
    heaps: dict[str, HeapNames] = field(default_factory=dict)

    def names_for(self, sort: Sort) -> HeapNames | None:
        info = self.source.sorts.get(sort.name)
        if info is None or not info.owner:
            return None
        return self.heaps.get(info.owner)

    def map_sort(self, sort: Sort) -> SExpr:
        info = self.source.sorts.get(sort.name)
        if info is not None and info.owner:
            names = self.heaps[info.owner]
            if info.kind == HEAP_SORT:
                return sym(names.record)
            if info.kind == ADDRESS:
                return sym("Int")
            if info.kind == ALLOC_RESULT:
                return sym(names.alloc_result)
        if sort.args:
            return SList((sym(sort.name),) + tuple(self.map_sort(a) for a in sort.args))
        return sym(sort.name)

    def map_sort_sexpr(self, e: SExpr) -> SExpr:
        return self.map_sort(self.source.resolve_sort(e))


def heap_vocabulary(sig: HeapSignature) -> set[str]:
    """Symbols that belong to the heap theory of ``sig`` and must not survive lowering."""
    n = sig.names
    return {sig.heap_sort.name, sig.address_sort.name, "read", "write", "allocate", "valid",
            n["emptyHeap"], n["nullAddress"], n["nthAddress"], n["AllocationResult"],
            n["AllocResult"], "_1", "_2", "is-" + n["AllocResult"]}


# ---------------------------------------------------------------------------
# Preamble

def _ctor_decl(name: str, fields) -> SList:
    return SList((sym(name),) + tuple(slist(sym(f), s) for f, s in fields))


def transpile_heap_decl(sig: HeapSignature, rm: RewriteMap,
                        cfg: TranspileConfig = TranspileConfig()) -> list[Command]:
    """Preamble commands for one heap; registers the heap's names in ``rm``."""
    src = rm.source
    H = sig.name
    names = HeapNames.make(H, cfg.prefix)
    taken = set(src.functions) | set(src.sorts)
    for n in names.all():
        if n in taken:
            raise TranspileError(f"generated name {n} collides with a declared symbol; "
                                 f"choose another prefix")
    rm.heaps[H] = names
    cmds: list[Command] = []

    if sig.datatypes:
        decs = SList(tuple(slist(sym(d), Numeral(0)) for d in sig.datatypes))
        bodies = []
        for d in sig.datatypes:
            dt = src.datatypes[d]
            bodies.append(SList(tuple(
                _ctor_decl(c.name, [(f, rm.map_sort(s)) for f, s in c.fields])
                for c in dt.constructors)))
        cmds.append(Command("declare-datatypes", (decs, SList(tuple(bodies)))))

    O = rm.map_sort(sig.object_sort)
    arr = slist(sym("Array"), sym("Int"), O)
    R = sym(names.record)
    cmds.append(Command("declare-datatypes", (
        slist(slist(R, Numeral(0))),
        slist(slist(_ctor_decl(names.ctor, [(names.size, sym("Int")), (names.contents, arr)]))))))
    cmds.append(Command("declare-datatypes", (
        slist(slist(sym(names.alloc_result), Numeral(0))),
        slist(slist(_ctor_decl(names.alloc_ctor, [(names.first, R), (names.second, sym("Int"))]))))))

    def_obj = _Rewriter(rm, cfg).rw(sig.def_obj)
    h, p, o, i = sym("h"), sym("p"), sym("o"), sym("i")
    size = slist(sym(names.size), h)
    contents = slist(sym(names.contents), h)

    def define(name, params, result, body):
        plist = SList(tuple(slist(sym(n), s) for n, s in params))
        cmds.append(Command("define-fun", (sym(name), plist, result, body)))

    define(names.valid, [("h", R), ("p", sym("Int"))], sym("Bool"),
           slist(sym("and"), slist(sym(">="), p, Numeral(1)), slist(sym("<="), p, size)))
    if cfg.const_empty_array:
        init: SExpr = slist(slist(sym("as"), sym("const"), arr), def_obj)
    else:
        cmds.append(Command("declare-const", (sym(names.init_array), arr)))
        init = sym(names.init_array)
    define(names.empty, [], R, slist(sym(names.ctor), Numeral(0), init))
    define(names.read, [("h", R), ("p", sym("Int"))], O,
           slist(sym("ite"), slist(sym(names.valid), h, p), slist(sym("select"), contents, p), def_obj))
    define(names.write, [("h", R), ("p", sym("Int")), ("o", O)], R,
           slist(sym("ite"), slist(sym(names.valid), h, p),
                 slist(sym(names.ctor), size, slist(sym("store"), contents, p, o)), h))
    succ = slist(sym("+"), size, Numeral(1))
    define(names.allocate, [("h", R), ("o", O)], sym(names.alloc_result),
           slist(sym(names.alloc_ctor),
                 slist(sym(names.ctor), succ, slist(sym("store"), contents, succ, o)), succ))
    if cfg.emit_heap_eq:
        h1, h2 = sym("h1"), sym("h2")
        s1 = slist(sym(names.size), h1)
        in_range = slist(sym("and"), slist(sym(">="), i, Numeral(1)), slist(sym("<="), i, s1))
        same = slist(sym("="), slist(sym("select"), slist(sym(names.contents), h1), i),
                     slist(sym("select"), slist(sym(names.contents), h2), i))
        define(names.heap_eq, [("h1", R), ("h2", R)], sym("Bool"),
               slist(sym("and"), slist(sym("="), s1, slist(sym(names.size), h2)),
                     slist(sym("forall"), slist(slist(i, sym("Int"))),
                           slist(sym("=>"), in_range, same))))
    if cfg.emit_wf_guards:
        outside = slist(sym("or"), slist(sym("<"), i, Numeral(1)), slist(sym(">"), i, size))
        define(names.wf, [("h", R)], sym("Bool"),
               slist(sym("and"), slist(sym(">="), size, Numeral(0)),
                     slist(sym("forall"), slist(slist(i, sym("Int"))),
                           slist(sym("=>"), outside,
                                 slist(sym("="), slist(sym("select"), contents, i), def_obj)))))
    return cmds


# ---------------------------------------------------------------------------
# Terms

class _Rewriter:
    def __init__(self, rm: RewriteMap, cfg: TranspileConfig):
        self.rm = rm
        self.cfg = cfg

    def guards(self, name: str, sort: Sort) -> list[SExpr]:
        if not self.cfg.emit_wf_guards:
            return []
        return self.guard_term(sym(name), sort)

    def guard_term(self, x: SExpr, sort: Sort) -> list[SExpr]:
        names = self.rm.names_for(sort)
        if names is None:
            return []
        kind = self.rm.source.sorts[sort.name].kind
        if kind == HEAP_SORT:
            return [slist(sym(names.wf), x)]
        if kind == ADDRESS:
            return [slist(sym(">="), x, Numeral(0))]
        return [slist(sym(names.wf), slist(sym(names.first), x)),
                slist(sym(">="), slist(sym(names.second), x), Numeral(0))]

    def heap_equal(self, a: SExpr, b: SExpr, sort: Sort) -> SExpr:
        names = self.rm.names_for(sort)
        kind = self.rm.source.sorts[sort.name].kind
        if kind == HEAP_SORT:
            return slist(sym(names.heap_eq), a, b)
        return slist(sym("and"),
                     slist(sym(names.heap_eq), slist(sym(names.first), a), slist(sym(names.first), b)),
                     slist(sym("="), slist(sym(names.second), a), slist(sym(names.second), b)))

    def rw(self, t: Term) -> SExpr:
        if isinstance(t, Var):
            return sym(t.name)
        if isinstance(t, Lit):
            return T.term_to_sexpr(t)
        if isinstance(t, Quant):
            binders = SList(tuple(slist(sym(n), self.rm.map_sort(s)) for n, s in t.binders))
            body = self.rw(t.body)
            gs = [g for n, s in t.binders for g in self.guards(n, s)]
            if gs:
                g = gs[0] if len(gs) == 1 else SList((sym("and"),) + tuple(gs))
                body = slist(sym("=>" if t.kind == "forall" else "and"), g, body)
            return slist(sym(t.kind), binders, body)
        if isinstance(t, Let):
            binds = SList(tuple(slist(sym(n), self.rw(v)) for n, v in t.bindings))
            return slist(sym("let"), binds, self.rw(t.body))
        fn = t.fn
        args = [self.rw(a) for a in t.args]
        if fn.kind == T.CORE and fn.name in ("=", "distinct") and self.cfg.emit_heap_eq:
            s = t.args[0].sort
            info = self.rm.source.sorts.get(s.name)
            if info is not None and info.kind in (HEAP_SORT, ALLOC_RESULT):
                if fn.name == "=":
                    parts = [self.heap_equal(a, b, s) for a, b in zip(args, args[1:])]
                else:
                    parts = [slist(sym("not"), self.heap_equal(a, b, s))
                             for a, b in itertools.combinations(args, 2)]
                return parts[0] if len(parts) == 1 else SList((sym("and"),) + tuple(parts))
        if fn.kind == T.HEAP:
            names = self.rm.heaps[fn.owner]
            if fn.op == "null":
                return Numeral(0)
            if fn.op == "nth":
                return Numeral(fn.index)
            if fn.op == "empty":
                return sym(names.empty)
            return SList((sym(getattr(names, fn.op)),) + tuple(args))
        ar_names = self.rm.heaps.get(self.rm.source.sorts[fn.owner].owner) \
            if fn.owner in self.rm.source.sorts and self.rm.source.sorts[fn.owner].kind == ALLOC_RESULT \
            else None
        if ar_names is not None:
            if fn.kind == T.SEL:
                return slist(sym(ar_names.first if fn.index == 0 else ar_names.second), *args)
            if fn.kind == T.CTOR:
                return slist(sym(ar_names.alloc_ctor), *args)
            if fn.kind == T.TEST:
                return slist(slist(sym("_"), sym("is"), sym(ar_names.alloc_ctor)), *args)
        if fn.kind == T.ARRAY and fn.name == "const":
            return slist(slist(sym("as"), sym("const"), self.rm.map_sort(fn.result)), *args)
        if fn.kind == T.TEST:
            head: SExpr = slist(sym("_"), sym("is"), sym(fn.op))
        else:
            head = sym(fn.name)
        if not args:
            return head
        return SList((head,) + tuple(args))


def rewrite_sexpr(t: Term, rm: RewriteMap, cfg: TranspileConfig = TranspileConfig()) -> SExpr:
    return _Rewriter(rm, cfg).rw(t)


def rewrite_term(t: Term, rm: RewriteMap, cfg: TranspileConfig = TranspileConfig(),
                 env: dict[str, Sort] | None = None) -> Term:
    """Rewrite ``t`` into the array vocabulary and type check it there."""
    e = rewrite_sexpr(t, rm, cfg)
    out_env = {n: rm.target.resolve_sort(rm.map_sort(s)) for n, s in (env or {}).items()}
    return typecheck_term(e, rm.target, out_env)


# ---------------------------------------------------------------------------
# Scripts

def _symbols_in(e: SExpr):
    if isinstance(e, Symbol):
        yield e.name
    elif isinstance(e, SList):
        for x in e:
            yield from _symbols_in(x)


def _check_ordering(commands: list) -> None:
    for idx, cmd in enumerate(commands):
        if not isinstance(cmd, DeclareHeap):
            continue
        d = cmd.decl
        vocab = set(mangle_names(d.heap_sort, d.addr_sort).values()) | {d.heap_sort, d.addr_sort}
        for earlier in commands[:idx]:
            if isinstance(earlier, DeclareHeap):
                continue
            used = set(_symbols_in(earlier.to_sexpr()))
            if isinstance(earlier, Command) and earlier.name in ("declare-fun", "declare-const",
                                                                  "define-fun"):
                used.discard(earlier.args[0].name)
            clash = sorted(used & vocab)
            if clash:
                raise TranspileError(
                    f"heap declaration of {d.heap_sort} must precede the first use of "
                    f"{', '.join(clash)}", cmd.span)


@dataclass
class TranspileResult:
    commands: list
    rewrite_map: RewriteMap
    source: ElaboratedScript

    @property
    def text(self) -> str:
        return print_script(self.commands)


def transpile_script(commands, cfg: TranspileConfig = TranspileConfig()) -> TranspileResult:
    """Lower a whole script; commands that do not involve heaps pass through unchanged."""
    if isinstance(commands, str):
        commands = parse_script(commands)
    commands = list(commands)
    _check_ordering(commands)
    script = ElaboratedScript(SortTable(), commands)
    rm = RewriteMap(script.table)
    out_script = ElaboratedScript(rm.target, [])
    out: list = []

    def emit(cmd):
        out.append(cmd)
        elaborate_command(cmd, out_script, plain=True)

    rewriter = _Rewriter(rm, cfg)
    for cmd in commands:
        n_assert = len(script.assertions)
        elaborate_command(cmd, script)
        if isinstance(cmd, OpaqueCommand):
            emit(cmd)
            continue
        if isinstance(cmd, DeclareHeap):
            for c in transpile_heap_decl(script.heaps[-1], rm, cfg):
                emit(c)
            continue
        name, args = cmd.name, cmd.args
        if name == "assert":
            emit(Command("assert", (rewriter.rw(script.assertions[n_assert]),), cmd.span))
        elif name in ("declare-fun", "declare-const"):
            fname = args[0].name
            if name == "declare-fun":
                params = SList(tuple(rm.map_sort_sexpr(s) for s in args[1]))
                new = Command(name, (args[0], params, rm.map_sort_sexpr(args[2])), cmd.span)
            else:
                new = Command(name, (args[0], rm.map_sort_sexpr(args[1])), cmd.span)
            emit(new)
            if fname in script.constants:
                for g in rewriter.guards(fname, script.constants[fname]):
                    emit(Command("assert", (g,)))
        elif name == "define-fun":
            params, body = script.table.defines[args[0].name]
            fs = next(f for f in script.table.lookup(args[0].name) if f.kind == T.DEFINED
                      and f.params == tuple(script.table.resolve_sort(p[1]) for p in args[1]))
            plist = SList(tuple(slist(sym(n), rm.map_sort(s)) for n, s in zip(params, fs.params)))
            emit(Command(name, (args[0], plist, rm.map_sort(fs.result), rewriter.rw(body)), cmd.span))
        elif name in ("declare-datatype", "declare-datatypes"):
            emit(Command(name, tuple(_map_sorts_in_datatypes(name, args, rm)), cmd.span))
        else:
            emit(cmd)
    return TranspileResult(out, rm, script)


def _map_sorts_in_datatypes(name: str, args, rm: RewriteMap):
    def ctors(clist):
        out = []
        for c in clist:
            if isinstance(c, Symbol):
                out.append(c)
                continue
            out.append(SList((c[0],) + tuple(slist(s[0], rm.map_sort_sexpr(s[1])) for s in c.items[1:])))
        return SList(tuple(out))
    if name == "declare-datatype":
        return (args[0], ctors(args[1]))
    return (args[0], SList(tuple(ctors(cl) for cl in args[1])))


def transpile_text(text: str, cfg: TranspileConfig = TranspileConfig()) -> str:
    return transpile_script(parse_script(text), cfg).text


def leaked_symbols(result: TranspileResult) -> set[str]:
    """Heap-theory symbols that still occur in the output (should be empty)."""
    vocab = set()
    for sig in result.source.heaps:
        vocab |= heap_vocabulary(sig)
    found = set()
    for c in result.commands:
        found |= set(_symbols_in(c.to_sexpr()))
    return found & vocab


# ---------------------------------------------------------------------------
# Axioms over the array encoding

ARRAY_BOUNDS = Bounds(2, 2, 3)


@dataclass
class ArrayModel:
    """Evaluation context for the lowered battery heap."""

    result: TranspileResult
    cfg: TranspileConfig
    evaluator: Evaluator
    names: HeapNames
    sig: HeapSignature
    heaps: list
    ints: list


def array_heap_universe(def_obj, objects: list, bounds: Bounds, ctor: str) -> list:
    """Record values for the array encoding.

    Counters run from -1 to the heap bound.  Besides the well-formed heaps
    (default object outside 1..counter) there are junk variants with one
    non-default cell just outside the allocated range, at counter + 1, 0 or -1.
    """
    out = []
    others = [o for o in objects if o != def_obj]
    for n in list(range(bounds.heap_size + 1)) + [-1]:
        cells = range(1, n + 1)
        for contents in itertools.product(objects, repeat=max(n, 0)):
            base = dict(zip(cells, contents))
            out.append(AdtValue(ctor, (n, ArrayValue.make(def_obj, base))))
            for junk_at in sorted({n + 1, 0, -1}):
                if 1 <= junk_at <= n:
                    continue
                for o in others:
                    m = dict(base)
                    m[junk_at] = o
                    out.append(AdtValue(ctor, (n, ArrayValue.make(def_obj, m))))
    return list(dict.fromkeys(out))


def array_model(bounds: Bounds = ARRAY_BOUNDS, cfg: TranspileConfig = TranspileConfig()) -> ArrayModel:
    text = battery_script(bounds.objects)
    result = transpile_script(text, cfg)
    sig = result.source.heap
    names = result.rewrite_map.heaps[sig.name]
    target = result.rewrite_map.target
    ints = list(range(-1, max(bounds.address, bounds.heap_size + 1) + 1))
    interp = Interpretation(int_range=(ints[0], ints[-1]))
    ev = Evaluator(target, interp)
    def_obj = ev.eval(sig.def_obj)
    if not cfg.const_empty_array:
        interp.values[names.init_array] = ArrayValue(def_obj)
    objects = ev.domain(sig.object_sort)
    heaps = array_heap_universe(def_obj, objects, bounds, names.ctor)
    images = []
    for h in heaps:
        for o in objects:
            images.append(_apply(ev, names.allocate, h, o).args[0])
    record_sort = Sort(names.record)
    interp.domains[record_sort] = heaps
    # allocation results whose address equals the counter: every other pair
    # falsifies any premise of the form allocate(h, o) = ar
    pair_heaps = list(dict.fromkeys(heaps + images))
    interp.domains[Sort(names.alloc_result)] = [
        AdtValue(names.alloc_ctor, (h, h.args[0])) for h in pair_heaps]
    return ArrayModel(result, cfg, ev, names, sig, heaps, ints)


def concretize(value, names: HeapNames, def_obj, alloc_ctor: str):
    """The array-encoding counterpart of a value of the heap semantics."""
    if isinstance(value, Address):
        return value.index
    if isinstance(value, HeapValue):
        cells = {i + 1: o for i, o in enumerate(value.contents)}
        return AdtValue(names.ctor, (value.size, ArrayValue.make(def_obj, cells)))
    if isinstance(value, AdtValue) and value.ctor == alloc_ctor:
        h, a = value.args
        return AdtValue(names.alloc_ctor, (concretize(h, names, def_obj, alloc_ctor),
                                           concretize(a, names, def_obj, alloc_ctor)))
    return value


def _apply(ev: Evaluator, name: str, *values):
    """Apply a defined function of the evaluator's table to computed values."""
    params, body = ev.table.defines[name]
    return ev.eval(body, dict(zip(params, values)))


def check_axiom_array(axiom: str, bounds: Bounds = ARRAY_BOUNDS,
                      cfg: TranspileConfig = TranspileConfig(),
                      model: ArrayModel | None = None) -> AxiomResult:
    """Check one axiom after rewriting it into the array encoding."""
    model = model or array_model(bounds, cfg)
    ev = model.evaluator
    if axiom == "cons":
        return _check_cons_array(model, bounds)
    formula = rewrite_term(axiom_formula(model.sig, axiom), model.result.rewrite_map, cfg)
    cex, n = find_counterexample(ev, formula)
    return AxiomResult(axiom, cex is None, cex, n)


def _check_cons_array(model: ArrayModel, bounds: Bounds) -> AxiomResult:
    names = model.names
    ev = model.evaluator
    def_obj = ev.eval(model.sig.def_obj)
    f = [_apply(ev, names.empty)]
    g = [0]
    checked = 0
    for i in range(bounds.address):
        pair = _apply(ev, names.allocate, f[i], def_obj)
        f.append(pair.args[0])
        g.append(pair.args[1])
        checked += 1
        if g[i + 1] != i + 1:
            return AxiomResult("cons", False, {"i": i + 1, "g": g[i + 1]}, checked)
    for p in model.ints:
        if model.cfg.emit_wf_guards and p < 0:
            continue
        if p > bounds.address:
            continue
        checked += 1
        if p not in g:
            return AxiomResult("cons", False, {"p": p}, checked,
                               note="address not reachable through allocate")
    return AxiomResult("cons", True, None, checked)


def run_array_battery(bounds: Bounds = ARRAY_BOUNDS, cfg: TranspileConfig = TranspileConfig(),
                      axioms=AXIOMS) -> list[AxiomResult]:
    model = array_model(bounds, cfg)
    return [check_axiom_array(a, bounds, cfg, model) for a in axioms]
