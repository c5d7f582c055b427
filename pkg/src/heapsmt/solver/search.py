"""Ground decision procedure for conjunctions of heap literals.

Heap sizes and addresses are integers related by difference constraints
(allocation: size' = size + 1 and the new address is size'; a valid
address lies in 1..size).  The search fixes, for every pair of address
nodes, whether they are equal or ordered, and for every address and heap
whether the address is within the heap's size.  Once that arrangement is
complete the minimal integer solution determines which heap cells exist and
which accesses coincide, and what remains is an equality problem over
objects (union-find, plus enumeration for datatype objects).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .. import terms as T
from ..errors import HeapSmtError
from ..semantics import (
    AdtValue, Address, Element, Evaluator, HeapValue, Interpretation,
)
from ..elaborator import ADT, UNINTERPRETED
from .fragment import (
    AddrEq, AllocEq, Conjunction, EmptyEq, HeapEq, Nth, ObjAtom, ObjEq, Purified,
    ReadEq, SizeDiff, Validity, WriteEq, purify,
)

NEG = float("-inf")
DEFAULT_BUDGET = 200_000


class InternalError(HeapSmtError):
    """A produced model does not satisfy its input: a bug, never a verdict."""


@dataclass
class SolveResult:
    verdict: str  # "sat" | "unsat" | "unknown"
    model: Interpretation | None = None
    stats: dict = field(default_factory=dict)

    @property
    def is_sat(self) -> bool:
        return self.verdict == "sat"


class _Budget(Exception):
    pass


class Graph:
    """Difference constraints x_i >= x_j + w closed under longest paths.

    ``d[i][j]`` is the best known w with x_i >= x_j + w.  Node 0 is zero.
    """

    __slots__ = ("n", "d")

    def __init__(self, n: int):
        self.n = n
        self.d = [[0 if i == j else NEG for j in range(n)] for i in range(n)]

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.d = [row[:] for row in self.d]
        return g

    def add(self, i: int, j: int, w: int) -> bool:
        d = self.d
        if w + d[j][i] > 0:
            return False
        if d[i][j] >= w:
            return True
        col_i = [d[p][i] for p in range(self.n)]
        row_j = d[j]
        for p in range(self.n):
            if col_i[p] == NEG:
                continue
            base = col_i[p] + w
            dp = d[p]
            for q in range(self.n):
                v = base + row_j[q]
                if v > dp[q]:
                    dp[q] = v
        return True

    # relations between two nodes
    def can(self, rel: str, x: int, y: int) -> bool:
        d = self.d
        if rel == "lt":
            return d[x][y] <= -1
        if rel == "gt":
            return d[y][x] <= -1
        if rel == "eq":
            return d[x][y] <= 0 and d[y][x] <= 0
        if rel == "le":
            return d[x][y] <= 0
        if rel == "ge":
            return d[y][x] <= 0
        raise ValueError(rel)

    def entailed(self, rel: str, x: int, y: int) -> bool:
        d = self.d
        if rel == "lt":
            return d[y][x] >= 1
        if rel == "gt":
            return d[x][y] >= 1
        if rel == "eq":
            return d[x][y] >= 0 and d[y][x] >= 0
        if rel == "le":
            return d[y][x] >= 0
        if rel == "ge":
            return d[x][y] >= 0
        raise ValueError(rel)

    def impose(self, rel: str, x: int, y: int) -> bool:
        if rel == "lt":
            return self.add(y, x, 1)
        if rel == "gt":
            return self.add(x, y, 1)
        if rel == "eq":
            return self.add(x, y, 0) and self.add(y, x, 0)
        if rel == "le":
            return self.add(y, x, 0)
        if rel == "ge":
            return self.add(x, y, 0)
        raise ValueError(rel)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def finite_domain(table, sort, seen=frozenset()) -> bool:
    """Whether the enumerated domain of ``sort`` is its complete value set."""
    if sort == T.BOOL:
        return True
    info = table.sorts.get(sort.name)
    if info is None or info.kind != ADT or sort.name in seen:
        return False
    dt = table.datatypes[sort.name]
    return all(finite_domain(table, s, seen | {sort.name}) for c in dt.constructors for _, s in c.fields)


class _Instance:
    """One expansion of the purified constraints (all disjunctions of heap
    disequalities resolved)."""

    def __init__(self, solver: "Solver", cs: list):
        self.solver = solver
        self.cs = cs
        p = solver.p
        used_h, used_a, used_o = set(), set(), set()
        for c in cs:
            for attr, bucket in (("h", used_h), ("h1", used_h), ("h2", used_h), ("dst", used_h),
                                 ("src", used_h), ("a", used_a), ("b", used_a),
                                 ("o", used_o), ("o1", used_o), ("o2", used_o)):
                v = getattr(c, attr, None)
                if isinstance(v, str):
                    bucket.add(v)
        used_h.update(p.heap_consts)
        used_a.update(p.addr_consts)
        for h, a in p.pair_consts.values():
            used_h.add(h)
            used_a.add(a)
        self.heaps = [h for h in p.heaps if h in used_h]
        self.addrs = [a for a in p.addrs if a in used_a]
        self.objs = [o for o in p.objs if o in used_o or o in p.obj_consts or o == p.def_node]

        # heaps that must have equal size share one size node
        uf = _UnionFind()
        for h in self.heaps:
            uf.find(h)
        for c in cs:
            if isinstance(c, WriteEq):
                uf.union(c.dst, c.src)
            elif isinstance(c, HeapEq) and c.positive:
                uf.union(c.h1, c.h2)
        roots = list(dict.fromkeys(uf.find(h) for h in self.heaps))
        self.node: dict[str, int] = {}
        for i, a in enumerate(self.addrs):
            self.node[a] = i + 1
        self.size_node = {}
        for i, r in enumerate(roots):
            self.size_node[r] = len(self.addrs) + 1 + i
        for h in self.heaps:
            self.size_node[h] = self.size_node[uf.find(h)]
        self.n = 1 + len(self.addrs) + len(roots)

    def initial(self):
        g = Graph(self.n)
        clauses = []
        ok = True
        for x in range(1, self.n):
            ok = ok and g.add(x, 0, 0)
        S, N = self.size_node, self.node
        for c in self.cs:
            if not ok:
                break
            if isinstance(c, EmptyEq):
                ok = g.impose("eq", S[c.h], 0)
            elif isinstance(c, AllocEq):
                ok = (g.add(S[c.dst], S[c.src], 1) and g.add(S[c.src], S[c.dst], -1)
                      and g.impose("eq", N[c.a], S[c.dst]))
            elif isinstance(c, Nth):
                ok = g.add(N[c.a], 0, c.index) and g.add(0, N[c.a], -c.index)
            elif isinstance(c, Validity):
                if c.positive:
                    ok = g.add(N[c.a], 0, 1) and g.impose("le", N[c.a], S[c.h])
                else:
                    clauses.append((("le", N[c.a], 0), ("gt", N[c.a], S[c.h])))
            elif isinstance(c, AddrEq):
                if c.positive:
                    ok = g.impose("eq", N[c.a], N[c.b])
                else:
                    clauses.append((("lt", N[c.a], N[c.b]), ("gt", N[c.a], N[c.b])))
            elif isinstance(c, SizeDiff):
                clauses.append((("lt", S[c.h1], S[c.h2]), ("gt", S[c.h1], S[c.h2])))
        return (g if ok else None), clauses

    def decisions(self):
        """Pair relations that must be fixed before the leaf check."""
        addr_nodes = [0] + [self.node[a] for a in self.addrs]
        size_nodes = sorted(set(self.size_node.values()))
        out = []
        for x, y in itertools.combinations(addr_nodes, 2):
            out.append((("lt", x, y), ("gt", x, y), ("eq", x, y)))
        for a in addr_nodes[1:]:
            for s in size_nodes:
                out.append((("le", a, s), ("gt", a, s)))
        return out


class Solver:
    def __init__(self, conj: Conjunction, budget: int = DEFAULT_BUDGET):
        self.conj = conj
        self.budget = budget
        self.p: Purified = purify(conj)
        self.nodes = 0
        self.leaves = 0
        self.unknown_reason = ""
        self.evaluator = Evaluator(conj.table, Interpretation())
        self.def_value_cache = None

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _Budget()

    def solve(self) -> SolveResult:
        start = time.perf_counter()
        verdict, model = "unsat", None
        try:
            for cs in self.p.expansions():
                inst = _Instance(self, cs)
                g, clauses = inst.initial()
                self.tick()
                if g is None:
                    continue
                found = self.search(inst, g, clauses, inst.decisions())
                if found is not None:
                    verdict, model = "sat", found
                    break
        except _Budget:
            verdict = "unknown"
            self.unknown_reason = "search budget exhausted"
        if verdict == "unsat" and self.unknown_reason:
            verdict = "unknown"
        stats = {"nodes": self.nodes, "leaves": self.leaves,
                 "seconds": round(time.perf_counter() - start, 6)}
        if verdict == "unknown":
            stats["reason"] = self.unknown_reason
        if model is not None:
            self.verify(model)
        return SolveResult(verdict, model, stats)

    # Search ----------------------------------------------------------------------
    def propagate(self, g: Graph, clauses) -> bool:
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                if any(g.entailed(*at) for at in cl):
                    continue
                possible = [at for at in cl if g.can(*at)]
                if not possible:
                    return False
                if len(possible) == 1:
                    if not g.impose(*possible[0]):
                        return False
                    changed = True
        return True

    def search(self, inst: _Instance, g: Graph, clauses, decisions):
        self.tick()
        if not self.propagate(g, clauses):
            return None
        for cl in clauses:
            if any(g.entailed(*at) for at in cl):
                continue
            return self.branch(inst, g, clauses, decisions, [at for at in cl if g.can(*at)])
        for options in decisions:
            possible = [at for at in options if g.can(*at)]
            if len(possible) > 1:
                return self.branch(inst, g, clauses, decisions, possible)
        return self.leaf(inst, g)

    def branch(self, inst, g, clauses, decisions, options):
        for at in options:
            h = g.copy()
            if h.impose(*at):
                found = self.search(inst, h, clauses, decisions)
                if found is not None:
                    return found
        return None

    # Leaf ---------------------------------------------------------------------------
    def leaf(self, inst: _Instance, g: Graph):
        self.leaves += 1
        p = self.p
        val = {a: int(g.d[inst.node[a]][0]) for a in inst.addrs}
        size = {h: int(g.d[inst.size_node[h]][0]) for h in inst.heaps}
        referenced = sorted({v for v in val.values() if v >= 1})

        def valid(h, j):
            return 1 <= j <= size[h]

        uf = _UnionFind()
        for o in inst.objs:
            uf.find(o)
        cells = {h: [j for j in referenced if valid(h, j)] for h in inst.heaps}
        for h in inst.heaps:
            for j in cells[h]:
                uf.find(("cell", h, j))
        diseqs = []
        atoms = []
        for c in inst.cs:
            if isinstance(c, ReadEq):
                j = val[c.a]
                uf.union(c.o, ("cell", c.h, j) if valid(c.h, j) else p.def_node)
            elif isinstance(c, WriteEq):
                j0 = val[c.a]
                for j in cells[c.src]:
                    uf.union(("cell", c.dst, j), c.o if j == j0 else ("cell", c.src, j))
            elif isinstance(c, AllocEq):
                j0 = val[c.a]
                uf.union(("cell", c.dst, j0), c.o)
                for j in cells[c.src]:
                    uf.union(("cell", c.dst, j), ("cell", c.src, j))
            elif isinstance(c, HeapEq) and c.positive:
                for j in cells[c.h1]:
                    uf.union(("cell", c.h1, j), ("cell", c.h2, j))
            elif isinstance(c, ObjEq):
                if c.positive:
                    uf.union(c.o1, c.o2)
                else:
                    diseqs.append((c.o1, c.o2))
            elif isinstance(c, ObjAtom):
                atoms.append(c)
        diseqs = [(uf.find(a), uf.find(b)) for a, b in diseqs]
        if any(a == b for a, b in diseqs):
            return None
        values = self.objects(uf, diseqs, atoms)
        if values is None:
            return None
        return self.build_model(inst, val, size, uf, values)

    def objects(self, uf: _UnionFind, diseqs, atoms):
        """Values for the object classes, or None when none exist."""
        roots = list(dict.fromkeys(uf.find(k) for k in list(uf.parent)))
        sort = self.conj.sig.object_sort
        if self.p.mode == "uninterpreted":
            return {r: Element(sort.name, i) for i, r in enumerate(roots)}
        ev = self.evaluator
        domain = ev.domain(sort)
        atom_roots = []
        for at in atoms:
            names = T.free_vars(at.term)
            atom_roots.append(sorted({uf.find(n) for n in names}, key=roots.index))
        involved = list(dict.fromkeys(
            [r for pair in diseqs for r in pair] + [r for rs in atom_roots for r in rs]))
        if not involved:
            for at in atoms:
                if bool(ev.eval(at.term, {})) != at.positive:
                    return None
            def_value = domain[0] if domain else None
            return {r: def_value for r in roots}
        pos = {r: i for i, r in enumerate(involved)}
        checks = [[] for _ in involved]
        for a, b in diseqs:
            checks[max(pos[a], pos[b])].append(("ne", a, b))
        for at, rs in zip(atoms, atom_roots):
            checks[max((pos[r] for r in rs), default=0)].append(("atom", at, None))
        assignment: dict = {}

        def ok(i):
            for kind, x, y in checks[i]:
                if kind == "ne":
                    if assignment[x] == assignment[y]:
                        return False
                else:
                    env = {n: assignment[uf.find(n)] for n in T.free_vars(x.term)}
                    if bool(ev.eval(x.term, env)) != x.positive:
                        return False
            return True

        def rec(i):
            self.tick()
            if i == len(involved):
                return True
            for v in domain:
                assignment[involved[i]] = v
                if ok(i) and rec(i + 1):
                    return True
            del assignment[involved[i]]
            return False

        if not rec(0):
            if not finite_domain(self.conj.table, sort):
                self.unknown_reason = "object enumeration bound reached"
            return None
        def_value = assignment.get(uf.find(self.p.def_node), domain[0] if domain else None)
        return {r: assignment.get(r, def_value) for r in roots}

    # Models ---------------------------------------------------------------------------
    def build_model(self, inst: _Instance, val, size, uf, values) -> Interpretation:
        p = self.p
        sig = self.conj.sig
        def_value = values[uf.find(p.def_node)]

        def heap_value(h):
            contents = []
            for j in range(1, size[h] + 1):
                key = ("cell", h, j)
                contents.append(values[uf.find(key)] if key in uf.parent else def_value)
            return HeapValue(size[h], tuple(contents))

        m = Interpretation()
        for h in p.heap_consts:
            m.values[h] = heap_value(h)
        for a in p.addr_consts:
            m.values[a] = Address(val[a])
        for o in p.obj_consts:
            m.values[o] = values[uf.find(o)]
        for name, (h, a) in p.pair_consts.items():
            m.values[name] = AdtValue(sig.alloc_ctor, (heap_value(h), Address(val[a])))
        if p.mode == "uninterpreted":
            m.universes[sig.object_sort.name] = max(1, len(set(values.values())))
        return m

    def verify(self, m: Interpretation) -> None:
        ev = Evaluator(self.conj.table, m)
        for lit in self.conj.literals:
            if ev.eval(lit) is not True:
                from ..sexpr import to_text
                raise InternalError(f"model does not satisfy {to_text(T.term_to_sexpr(lit))}")


def solve(conj: Conjunction, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Decide ``conj``; SAT results carry a model that has been re-checked."""
    return Solver(conj, budget).solve()
