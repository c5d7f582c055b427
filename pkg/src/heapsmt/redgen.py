"""Benchmark generators: SAT as heap conjunctions, an interpolation instance, fixtures.

The SAT encoding works over a heap with exactly two allocated cells, both
holding F.  Each Boolean variable x_j gets two addresses a_j and abar_j
that must be distinct valid cells, so exactly one of them is the first
cell.  A clause writes T through the addresses of its literals and then
reads the first cell back: the read yields T only if some literal's
address is the first cell.  Truth is decoded as ``a_j == nthAddress 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import GenerationError
from .semantics import Address

UNSORTED_PREAMBLE = (
    "(declare-sort O 0)\n"
    "(declare-fun d () O)\n"
    "(declare-heap Heap Address O d () ())\n"
)


@dataclass(frozen=True)
class Cnf:
    m: int
    clauses: tuple  # tuple of tuples of non-zero ints

    def __post_init__(self):
        if self.m == 0 and self.clauses:
            raise GenerationError("a CNF with clauses needs at least one variable")
        for c in self.clauses:
            if not c:
                raise GenerationError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.m:
                    raise GenerationError(f"literal {lit} outside 1..{self.m}")

    @classmethod
    def of(cls, m: int, clauses) -> "Cnf":
        return cls(m, tuple(tuple(c) for c in clauses))

    def evaluate(self, assignment) -> bool:
        """``assignment[j-1]`` is the value of variable j."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.m} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> Cnf:
    m = None
    clauses, cur = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise GenerationError(f"bad problem line: {line!r}")
            m = int(parts[2])
            continue
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise GenerationError(f"bad DIMACS token {tok!r}") from None
            if v == 0:
                if not cur:
                    raise GenerationError("empty clause")
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(tuple(cur))
    if m is None:
        raise GenerationError("missing 'p cnf' line")
    return Cnf.of(m, clauses)


def brute_force(cnf: Cnf):
    """A satisfying assignment as a tuple of bools, or None."""
    for bits in itertools.product((False, True), repeat=cnf.m):
        if cnf.evaluate(bits):
            return bits
    return None


def random_cnf(rng: random.Random, max_vars: int = 5, max_clauses: int = 8) -> Cnf:
    m = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, min(3, m) if rng.random() < 0.8 else m)
        vs = rng.sample(range(1, m + 1), width)
        c = [v if rng.random() < 0.5 else -v for v in vs]
        if rng.random() < 0.1:
            c.append(-c[0])  # a tautology now and then
        clauses.append(c)
    return Cnf.of(m, clauses)


def exhaustive_cnfs(m: int, max_clauses: int):
    """Every CNF over x1..xm with 1..max_clauses distinct clauses, one per symmetry class.

    Renaming variables and flipping their polarity preserves satisfiability,
    so only one member of each orbit is produced.  Clauses are sets of
    literals and may contain both x and not x.
    """
    lits = [s * v for v in range(1, m + 1) for s in (1, -1)]
    clauses = [frozenset(c) for r in range(1, len(lits) + 1)
               for c in itertools.combinations(lits, r)]
    index = {c: i for i, c in enumerate(clauses)}
    images = []  # images[g][i]: index of clause i under symmetry g
    for perm in itertools.permutations(range(1, m + 1)):
        for signs in itertools.product((1, -1), repeat=m):
            def f(l, perm=perm, signs=signs):
                v = abs(l) - 1
                return perm[v] * signs[v] * (1 if l > 0 else -1)
            images.append([index[frozenset(f(l) for l in c)] for c in clauses])
    for k in range(1, max_clauses + 1):
        seen = set()
        for combo in itertools.combinations(range(len(clauses)), k):
            if combo in seen:
                continue
            for g in images:
                seen.add(tuple(sorted(g[i] for i in combo)))
            yield Cnf.of(m, [sorted(clauses[i], key=lambda l: (abs(l), -l)) for i in combo])


def _target(clause, j: int) -> str:
    pos, neg = j in clause, -j in clause
    if pos and neg:
        return "(_ nthAddress 1)"
    if pos:
        return f"a{j}"
    if neg:
        return f"abar{j}"
    return "nullAddress"


def sat_to_heap_text(cnf: Cnf) -> str:
    out = [
        "(declare-sort O 0)\n",
        "(declare-fun T () O)\n",
        "(declare-fun F () O)\n",
        "(declare-heap Heap Address O F () ())\n",
        "(declare-const h Heap)\n",
    ]
    for j in range(1, cnf.m + 1):
        out.append(f"(declare-const a{j} Address)\n(declare-const abar{j} Address)\n")
    out.append("(assert (not (= T F)))\n")
    out.append("(assert (= h (_1 (allocate (_1 (allocate emptyHeap F)) F))))\n")
    for j in range(1, cnf.m + 1):
        out.append(f"(assert (and (valid h a{j}) (valid h abar{j}) (not (= a{j} abar{j}))))\n")
    for c in cnf.clauses:
        w = "h"
        for j in range(1, cnf.m + 1):
            w = f"(write {w} {_target(c, j)} T)"
        out.append(f"(assert (= T (read {w} (_ nthAddress 1))))\n")
    out.append("(check-sat)\n")
    return "".join(out)


def sat_to_heap(cnf: Cnf):
    """The encoding as a solver conjunction together with its script text."""
    from .solver import conjunction_from_text
    text = sat_to_heap_text(cnf)
    return conjunction_from_text(text), text


def decode(cnf: Cnf, model) -> tuple:
    return tuple(model.values[f"a{j}"] == Address(1) for j in range(1, cnf.m + 1))


# Interpolation ----------------------------------------------------------------

LEMMA2_DECLS = (
    "(declare-const h1 Heap)\n(declare-const h2 Heap)\n"
    "(declare-const p1 Address)\n(declare-const p2 Address)\n(declare-const p3 Address)\n"
    "(declare-const o1 O)\n"
)
LEMMA2_A = "(assert (= h2 (write h1 p1 o1)))\n(assert (valid h1 p1))\n"
LEMMA2_B = (
    "(assert (not (= p2 p3)))\n"
    "(assert (not (= (read h2 p2) (read h1 p2))))\n"
    "(assert (not (= (read h2 p3) (read h1 p3))))\n"
    "(assert (valid h1 p2))\n"
    "(assert (valid h1 p3))\n"
)


@dataclass(frozen=True)
class Lemma2Instance:
    a: str
    b: str
    combined: str


def emit_lemma2_instance() -> Lemma2Instance:
    """A and B share h1, h2; A alone and B alone are satisfiable, A and B together are not."""
    head = UNSORTED_PREAMBLE + LEMMA2_DECLS
    tail = "(check-sat)\n"
    return Lemma2Instance(head + LEMMA2_A + tail, head + LEMMA2_B + tail,
                          head + LEMMA2_A + LEMMA2_B + tail)


# Fixtures ---------------------------------------------------------------------

MOTIVATION = """\
; A singly linked list built from a Nil and a Cons cell, whose head is then
; incremented in place and checked.
(declare-heap Heap Addr Object
  O_Empty
  ((Object 0) (IntList 0) (Cons 0) (Nil 0))
  (((O_Cons (getCons Cons)) (O_Nil (getNil Nil)) (O_Empty))
   ((IntList (_sz Int)))
   ((Cons (Cons_parent IntList) (head Int) (tail Addr)))
   ((Nil (Nil_parent IntList)))))

(declare-fun Inv1 (Heap) Bool)
(declare-fun Inv2 (Heap Addr) Bool)
(declare-fun Inv3 (Heap Addr) Bool)
(declare-fun Inv4 (Heap Addr) Bool)

; entry: nothing allocated yet
(assert (Inv1 emptyHeap))

; n = new Nil()
(assert (forall ((h Heap) (ar AllocationResultHeap))
  (=> (and (Inv1 h) (= ar (allocate h (O_Nil (Nil (IntList 0))))))
      (Inv2 (_1 ar) (_2 ar)))))

; l = new Cons(42, n)
(assert (forall ((h Heap) (n Addr) (ar AllocationResultHeap))
  (=> (and (Inv2 h n) (= ar (allocate h (O_Cons (Cons (IntList 1) 42 n)))))
      (Inv3 (_1 ar) (_2 ar)))))

; every access through l is memory safe
(assert (forall ((h Heap) (l Addr))
  (=> (Inv3 h l) (valid h l))))

; l.setHd(l.hd() + 1) when l is a Cons
(assert (forall ((h Heap) (l Addr) (c Cons))
  (=> (and (Inv3 h l) (= (read h l) (O_Cons c)))
      (Inv4 (write h l (O_Cons (Cons (Cons_parent c) (+ (head c) 1) (tail c)))) l))))

; l.hd() on a Nil fails
(assert (forall ((h Heap) (l Addr) (n Nil))
  (=> (and (Inv3 h l) (= (read h l) (O_Nil n))) false)))

; assert l.hd() == 43
(assert (forall ((h Heap) (l Addr))
  (=> (and (Inv4 h l) ((_ is O_Cons) (read h l)))
      (= (head (getCons (read h l))) 43))))

; the same property, phrased with a tester
(assert (forall ((h Heap) (l Addr))
  (=> (Inv4 h l) (is-O_Cons (read h l)))))

(check-sat)
"""

EXT_DEFECT = UNSORTED_PREAMBLE + """\
(declare-const h1 Heap)
(declare-const h2 Heap)
; same cells, same contents, yet different heaps: impossible for real heaps,
; possible when junk beyond the size is visible to array equality
(assert (forall ((p Address)) (= (valid h1 p) (valid h2 p))))
(assert (forall ((p Address)) (= (read h1 p) (read h2 p))))
(assert (not (= h1 h2)))
(check-sat)
"""


def fixture_texts(uncorrected: bool = False) -> dict[str, str]:
    from .transpiler import TranspileConfig, transpile_text
    cfg = TranspileConfig.uncorrected() if uncorrected else TranspileConfig()
    return {
        "motivation.smt2": MOTIVATION,
        "motivation.plain.smt2": transpile_text(MOTIVATION, cfg),
        "ext-defect.smt2": EXT_DEFECT,
    }


def write_files(outdir, files: dict[str, str]) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        written.append(p)
    return written


def emit_fixtures(outdir, uncorrected: bool = False) -> list[Path]:
    return write_files(outdir, fixture_texts(uncorrected))
