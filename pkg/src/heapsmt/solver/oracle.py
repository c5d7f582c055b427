"""Brute-force model enumeration, used as an independent check on the solver.

Nothing here shares inference code with the search: free constants are
assigned values from finite domains and literals are evaluated with the
reference semantics as soon as all their constants are known.

Elements of an uninterpreted object sort are interchangeable, so values are
enumerated up to renaming: object constants first, then heap cells in
order, each taking an element already used or the next unused one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .. import terms as T
from ..elaborator import ADDRESS, ALLOC_RESULT, HEAP_SORT, UNINTERPRETED
from ..errors import BudgetExceeded
from ..semantics import (
    AdtValue, Address, Bounds, Element, Evaluator, HeapValue, Interpretation,
)
from .fragment import Conjunction

DEFAULT_ORACLE_BUDGET = 2_000_000


@dataclass
class OracleResult:
    verdict: str  # "sat" | "unsat" (within bounds)
    model: Interpretation | None
    bounds: Bounds
    steps: int = 0


class _Space:
    def __init__(self, conj: Conjunction, bounds: Bounds, ev: Evaluator):
        self.sig = conj.sig
        self.table = conj.table
        self.bounds = bounds
        self.ev = ev
        self.obj_sort = conj.sig.object_sort
        self.uninterpreted = self.table.sorts[self.obj_sort.name].kind == UNINTERPRETED

    def kind(self, sort) -> str:
        if sort == self.obj_sort:
            return "object"
        info = self.table.sorts.get(sort.name)
        if info is not None and info.owner == self.sig.name:
            return {HEAP_SORT: "heap", ADDRESS: "address", ALLOC_RESULT: "pair"}[info.kind]
        return "other"

    def objects(self, used: int) -> Iterator[tuple[object, int]]:
        """Object values with the number of elements in use afterwards."""
        if not self.uninterpreted:
            for v in self.ev.domain(self.obj_sort):
                yield v, used
            return
        for i in range(min(used + 1, self.bounds.objects)):
            yield Element(self.obj_sort.name, i), max(used, i + 1)

    def contents(self, n: int, used: int) -> Iterator[tuple[tuple, int]]:
        if n == 0:
            yield (), used
            return
        for head, u in self.objects(used):
            for tail, u2 in self.contents(n - 1, u):
                yield (head,) + tail, u2

    def heaps(self, used: int) -> Iterator[tuple[HeapValue, int]]:
        for n in range(self.bounds.heap_size + 1):
            for c, u in self.contents(n, used):
                yield HeapValue(n, c), u

    def values(self, sort, used: int) -> Iterator[tuple[object, int]]:
        k = self.kind(sort)
        if k == "object":
            yield from self.objects(used)
        elif k == "address":
            for i in range(self.bounds.address + 1):
                yield Address(i), used
        elif k == "heap":
            yield from self.heaps(used)
        elif k == "pair":
            for h, u in self.heaps(used):
                for i in range(self.bounds.address + 1):
                    yield AdtValue(self.sig.alloc_ctor, (h, Address(i))), u
        else:
            for v in self.ev.domain(sort):
                yield v, used

    def size(self, sort) -> int:
        """Domain size ignoring the renaming symmetry (an upper bound on the work)."""
        k = self.kind(sort)
        U = self.bounds.objects if self.uninterpreted else len(self.ev.domain(self.obj_sort))
        heaps = sum(U ** n for n in range(self.bounds.heap_size + 1))
        if k == "object":
            return U
        if k == "address":
            return self.bounds.address + 1
        if k == "heap":
            return heaps
        if k == "pair":
            return heaps * (self.bounds.address + 1)
        return len(self.ev.domain(sort))


def _prepare(conj: Conjunction, bounds: Bounds):
    interp = Interpretation(heap_bound=bounds.heap_size, addr_bound=bounds.address)
    kind = conj.table.sorts[conj.sig.object_sort.name].kind
    if kind == UNINTERPRETED:
        interp.universes[conj.sig.object_sort.name] = bounds.objects
    ev = Evaluator(conj.table, interp)
    space = _Space(conj, bounds, ev)
    consts = conj.constants()
    order = {"object": 0, "address": 1, "heap": 2, "pair": 3, "other": 4}
    names = sorted(consts, key=lambda n: order[space.kind(consts[n])])
    return interp, ev, space, consts, names


def estimate(conj: Conjunction, bounds: Bounds) -> int:
    """Assignments a naive enumeration would visit (no symmetry, no pruning)."""
    _, _, space, consts, names = _prepare(conj, bounds)
    return math.prod(space.size(consts[n]) for n in names)


def enumerate_models(conj: Conjunction, bounds: Bounds,
                     budget: int = DEFAULT_ORACLE_BUDGET) -> OracleResult:
    """Search every interpretation of the free constants within ``bounds``.

    Raises :class:`BudgetExceeded` (carrying the naive estimate) once more
    than ``budget`` partial assignments have been visited.
    """
    interp, ev, space, consts, names = _prepare(conj, bounds)
    index = {n: i for i, n in enumerate(names)}
    checks = [[] for _ in range(len(names) + 1)]
    hidden = set(T.constants(conj.sig.def_obj)) & set(index)  # reads may yield defObj
    for lit in conj.literals:
        deps = set(T.constants(lit)) | hidden
        last = max((index[c] + 1 for c in deps), default=0)
        checks[last].append(lit)

    values: dict = {}
    interp.values = values
    steps = 0

    def holds(level: int) -> bool:
        for lit in checks[level]:
            if ev.eval(lit) is not True:
                return False
        return True

    def rec(i: int, used: int) -> bool:
        nonlocal steps
        if i == len(names):
            return True
        name = names[i]
        for v, u in space.values(consts[name], used):
            steps += 1
            if steps > budget:
                raise BudgetExceeded(
                    f"enumeration exceeded its budget of {budget} steps "
                    f"(naive estimate {estimate(conj, bounds)})", estimate(conj, bounds))
            values[name] = v
            if holds(i + 1) and rec(i + 1, u):
                return True
        del values[name]
        return False

    if holds(0) and rec(0, 0):
        model = Interpretation(values=dict(values), universes=dict(interp.universes))
        return OracleResult("sat", model, bounds, steps)
    return OracleResult("unsat", None, bounds, steps)
