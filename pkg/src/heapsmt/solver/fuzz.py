"""Seeded random conjunctions for differential testing of the solver."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

PREAMBLE = "(declare-sort O 0)\n(declare-fun d () O)\n(declare-heap H A O d () ())\n"


@dataclass(frozen=True)
class FuzzShape:
    max_literals: int = 6
    max_addr_vars: int = 3
    max_heap_vars: int = 2
    max_obj_vars: int = 2
    max_depth: int = 2
    max_nth: int = 2


class _Gen:
    def __init__(self, rng: random.Random, shape: FuzzShape):
        self.rng = rng
        self.shape = shape
        self.hs = [f"h{i}" for i in range(1, rng.randint(0, shape.max_heap_vars) + 1)]
        self.ps = [f"p{i}" for i in range(1, rng.randint(1, shape.max_addr_vars) + 1)]
        self.os = [f"o{i}" for i in range(1, rng.randint(0, shape.max_obj_vars) + 1)]

    def heap(self, depth: int) -> str:
        r = self.rng
        leaves = self.hs + ["emptyH"]
        if depth <= 0 or r.random() < 0.45:
            return r.choice(leaves)
        if r.random() < 0.6:
            return f"(write {self.heap(depth - 1)} {self.addr(depth - 1)} {self.obj(depth - 1)})"
        return f"(_1 (allocate {self.heap(depth - 1)} {self.obj(depth - 1)}))"

    def addr(self, depth: int) -> str:
        r = self.rng
        x = r.random()
        if depth <= 0 or x < 0.6:
            return r.choice(self.ps)
        if x < 0.72:
            return "nullA"
        if x < 0.86:
            return f"(_ nthA {r.randint(1, self.shape.max_nth)})"
        return f"(_2 (allocate {self.heap(depth - 1)} {self.obj(depth - 1)}))"

    def obj(self, depth: int) -> str:
        r = self.rng
        if depth <= 0 or r.random() < 0.5:
            return r.choice(self.os + ["d"])
        return f"(read {self.heap(depth - 1)} {self.addr(depth - 1)})"

    def literal(self) -> str:
        r = self.rng
        d = self.shape.max_depth
        kind = r.choice(["valid", "addr", "obj", "heap"] if self.hs else ["valid", "addr", "obj", "heap"])
        if kind == "valid":
            atom = f"(valid {self.heap(d)} {self.addr(d - 1)})"
        elif kind == "addr":
            atom = f"(= {self.addr(d)} {self.addr(d)})"
        elif kind == "obj":
            atom = f"(= {self.obj(d)} {self.obj(d)})"
        else:
            atom = f"(= {self.heap(d)} {self.heap(d)})"
        return atom if r.random() < 0.5 else f"(not {atom})"

    def script(self) -> str:
        lines = [PREAMBLE]
        for h in self.hs:
            lines.append(f"(declare-const {h} H)\n")
        for p in self.ps:
            lines.append(f"(declare-const {p} A)\n")
        for o in self.os:
            lines.append(f"(declare-const {o} O)\n")
        for _ in range(self.rng.randint(1, self.shape.max_literals)):
            lines.append(f"(assert {self.literal()})\n")
        lines.append("(check-sat)\n")
        return "".join(lines)


def random_script(rng: random.Random, shape: FuzzShape = FuzzShape()) -> str:
    return _Gen(rng, shape).script()


@dataclass
class DiffOutcome:
    seed: int
    index: int
    script: str
    solver: str
    oracle: str | None  # None when the oracle ran out of budget
    model_ok: bool | None = None

    @property
    def agrees(self) -> bool:
        return self.oracle is None or (self.solver == self.oracle and self.model_ok is not False)


@dataclass
class DiffReport:
    outcomes: list = field(default_factory=list)

    @property
    def checked(self):
        return [o for o in self.outcomes if o.oracle is not None]

    @property
    def rejected(self) -> int:
        return sum(1 for o in self.outcomes if o.oracle is None)

    @property
    def disagreements(self):
        return [o for o in self.outcomes if not o.agrees]


SHAPES = (FuzzShape(max_depth=1), FuzzShape(max_depth=2))


def differential(count: int, seed: int = 0, oracle_budget: int = 50_000,
                 shapes=SHAPES, limit: int | None = None) -> DiffReport:
    """Run solver and oracle side by side until ``count`` instances were checked.

    Instances the oracle cannot finish within ``oracle_budget`` are recorded
    as rejected and do not count.  ``limit`` caps the number generated.
    """
    from ..errors import BudgetExceeded
    from ..semantics import Evaluator
    from .bounds import model_bound
    from .fragment import conjunction_from_text
    from .oracle import enumerate_models
    from .search import solve

    rng = random.Random(seed)
    report = DiffReport()
    i = 0
    while len(report.checked) < count and (limit is None or i < limit):
        text = random_script(rng, shapes[i % len(shapes)])
        conj = conjunction_from_text(text)
        res = solve(conj)
        out = DiffOutcome(seed, i, text, res.verdict, None)
        if res.is_sat:
            ev = Evaluator(conj.table, res.model)
            out.model_ok = all(ev.eval(lit) is True for lit in conj.literals)
        try:
            out.oracle = enumerate_models(conj, model_bound(conj), oracle_budget).verdict
        except BudgetExceeded:
            pass
        report.outcomes.append(out)
        i += 1
    return report
