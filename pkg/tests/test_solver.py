import random

import pytest
from hypothesis import given, settings, strategies as st

from heapsmt.errors import BudgetExceeded, FragmentError
from heapsmt.redgen import UNSORTED_PREAMBLE, Cnf, emit_lemma2_instance, sat_to_heap
from heapsmt.semantics import Address, Bounds, Evaluator
from heapsmt.solver import conjunction_from_text, purify, solve
from heapsmt.solver.bounds import model_bound
from heapsmt.solver.fragment import EmptyEq, ReadEq, Validity, WriteEq
from heapsmt.solver.fuzz import FuzzShape, differential, _Gen
from heapsmt.solver.oracle import enumerate_models, estimate

DECLS = (UNSORTED_PREAMBLE +
         "(declare-const h Heap)(declare-const h1 Heap)(declare-const h2 Heap)"
         "(declare-const p Address)(declare-const q Address)"
         "(declare-const o O)(declare-const o1 O)(declare-const o2 O)\n")


def conj(*asserts):
    return conjunction_from_text(DECLS + "".join(f"(assert {a})" for a in asserts))


def verdict(*asserts):
    return solve(conj(*asserts)).verdict


def flat(*asserts):
    return purify(conj(*asserts)).constraints


# purification

def test_purify_read_over_write():
    cs = flat("(= (read (write h p o1) p) o2)")
    (w,) = [c for c in cs if isinstance(c, WriteEq)]
    (r,) = [c for c in cs if isinstance(c, ReadEq)]
    assert (w.src, w.a, w.o) == ("h", "p", "o1")
    assert r.h == w.dst and r.a == "p"


def test_purify_valid_empty():
    cs = flat("(valid emptyHeap p)")
    (e,) = [c for c in cs if isinstance(c, EmptyEq)]
    assert Validity(e.h, "p", True) in cs


def test_purify_write_chain():
    c, _ = sat_to_heap(Cnf.of(3, [[1, -2, 3]]))
    writes = [x for x in purify(c).constraints if isinstance(x, WriteEq)]
    assert len(writes) == 3
    assert writes[1].src == writes[0].dst and writes[2].src == writes[1].dst


@pytest.mark.parametrize("bad", [
    "(forall ((x Address)) (valid h x))",
    "(or (valid h p) (valid h q))",
])
def test_outside_the_fragment(bad):
    with pytest.raises(FragmentError):
        purify(conj(bad))


def test_one_heap_only():
    text = UNSORTED_PREAMBLE + "(declare-heap H2 A2 O d () ())(assert (valid emptyH2 nullA2))"
    with pytest.raises(FragmentError):
        conjunction_from_text(text)


# solving

def test_nothing_valid_in_empty_heap():
    assert verdict("(valid emptyHeap p)") == "unsat"


def test_fresh_address_is_never_null():
    assert verdict("(= (_2 (allocate emptyHeap o)) nullAddress)") == "unsat"


def test_write_then_read_back_can_miss():
    c = conj("(= (read (write h p o1) p) o2)", "(not (= o1 o2))")
    r = solve(c)
    assert r.verdict == "sat"
    m = r.model
    h, p = m.values["h"], m.values["p"]
    assert not (1 <= p.index <= h.size)
    assert m.values["o2"] == m.values["d"]


def test_models_satisfy_their_input():
    c = conj("(valid h p)", "(not (= p q))", "(valid h q)", "(= (read h p) o)",
             "(not (= (read h q) o))")
    r = solve(c)
    assert r.verdict == "sat"
    ev = Evaluator(c.table, r.model)
    assert all(ev.eval(lit) is True for lit in c.literals)


def test_allocation_chain_reaches_nth():
    assert verdict("(= h (_1 (allocate (_1 (allocate emptyHeap o)) o)))",
                   "(not (valid h (_ nthAddress 2)))") == "unsat"
    assert verdict("(= h (_1 (allocate (_1 (allocate emptyHeap o)) o)))",
                   "(valid h (_ nthAddress 3))") == "unsat"


def test_equal_sizes_give_equal_fresh_addresses():
    # equal fresh addresses mean equal sizes, hence equal validity everywhere
    assert verdict("(= (_2 (allocate h1 o1)) (_2 (allocate h2 o2)))",
                   "(valid h1 p)", "(not (valid h2 p))") == "unsat"
    assert verdict("(= h1 h2)", "(not (= (_2 (allocate h1 o1)) (_2 (allocate h2 o2))))") == "unsat"


def test_heap_disequality_needs_a_witness():
    assert verdict("(= h1 (write h p o))", "(= h2 (write h p o))", "(not (= h1 h2))") == "unsat"
    assert verdict("(not (= h1 h2))", "(valid h1 p)") == "sat"


def test_two_cell_interpolation_instance():
    inst = emit_lemma2_instance()
    assert solve(conjunction_from_text(inst.combined)).verdict == "unsat"
    assert solve(conjunction_from_text(inst.a)).verdict == "sat"
    assert solve(conjunction_from_text(inst.b)).verdict == "sat"


def test_budget_exhaustion_is_unknown():
    c, _ = sat_to_heap(Cnf.of(3, [[1, 2], [-1, 3], [-2, -3], [1, -3]]))
    r = solve(c, budget=1)
    assert r.verdict == "unknown" and r.model is None


def test_adt_objects():
    text = ("(declare-datatypes ((C 0)) (((red) (green) (blue))))"
            "(declare-heap H A C red () ())"
            "(declare-const h H)(declare-const p A)"
            "(assert (valid h p))(assert (not (= (read h p) red)))(assert (not (= (read h p) green)))")
    r = solve(conjunction_from_text(text))
    assert r.verdict == "sat"
    assert r.model.values["h"].contents[r.model.values["p"].index - 1].ctor == "blue"


# the oracle

def test_oracle_empty_heap():
    c = conj("(valid emptyHeap p)")
    for b in (Bounds(0, 1, 0), Bounds(2, 2, 3)):
        assert enumerate_models(c, b).verdict == "unsat"


def test_oracle_empty_conjunction():
    r = enumerate_models(conjunction_from_text(UNSORTED_PREAMBLE), Bounds(0, 1, 0))
    assert r.verdict == "sat"


def test_oracle_refuses_large_spaces():
    # unsatisfiable only through the heaps, so every heap pair is visited
    c = conj("(= h1 h2)", "(not (= (read h1 p) (read h2 p)))")
    with pytest.raises(BudgetExceeded) as e:
        enumerate_models(c, Bounds(6, 4, 6), budget=100)
    assert e.value.required == estimate(c, Bounds(6, 4, 6)) > 100


def test_oracle_reproduces_solver_example():
    c = conj("(= (read (write h p o1) p) o2)", "(not (= o1 o2))")
    r = enumerate_models(c, Bounds(2, 2, 2))
    assert r.verdict == "sat"
    m = r.model
    assert not (1 <= m.values["p"].index <= m.values["h"].size)


# bounds

def test_bound_for_sat_encoding():
    for m in (1, 2, 3):
        c, _ = sat_to_heap(Cnf.of(m, [[1]]))
        assert model_bound(c).heap_size >= 2 + 2 * m


def test_bound_for_empty_conjunction():
    assert model_bound(conjunction_from_text(UNSORTED_PREAMBLE)) == Bounds(0, 1, 0)


def test_bound_for_axiom_instance():
    b = model_bound(conj("(valid h p)", "(not (= (read (write h p o) p) o))"))
    assert b.heap_size <= 3


# differential

def test_small_differential_run():
    report = differential(60, seed=11)
    assert len(report.checked) == 60
    assert report.disagreements == []


def test_differential_counts_only_finished_instances():
    report = differential(5, seed=1, oracle_budget=1, limit=20)
    assert report.rejected > 0
    assert report.rejected + len(report.checked) == len(report.outcomes) <= 20


# every ground instance of the quantifier-free axioms is entailed

NEGATED = {
    "row1": ["(valid {H} {P})", "(not (= (read (write {H} {P} {O}) {P}) {O}))"],
    "row2": ["(not (= {P} {Q}))", "(not (= (read (write {H} {P} {O}) {Q}) (read {H} {Q})))"],
    "roa1": ["(not (= (read (_1 (allocate {H} {O})) (_2 (allocate {H} {O}))) {O}))"],
    "roa2": ["(not (= {P} (_2 (allocate {H} {O}))))",
             "(not (= (read (_1 (allocate {H} {O})) {P}) (read {H} {P})))"],
    "ivwt": ["(not (valid {H} {P}))", "(not (= (write {H} {P} {O}) {H}))"],
    "ivrd": ["(not (valid {H} {P}))", "(not (= (read {H} {P}) d))"],
    "vld1": ["(valid emptyHeap {P})"],
    "vld2": ["(valid {H} nullAddress)"],
}


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(NEGATED)), st.integers(0, 10**6))
def test_negated_axiom_instances_are_unsat(axiom, seed):
    g = _Gen(random.Random(seed), FuzzShape(max_depth=1, max_heap_vars=2))
    g.hs = ["h1", "h2"]
    g.ps = ["p", "q"]
    g.os = ["o1", "o2"]
    terms = {"H": g.heap(1), "P": g.addr(1), "Q": g.addr(1), "O": g.obj(1)}
    lits = [t.format(**terms).replace("emptyH ", "emptyHeap ").replace("emptyH)", "emptyHeap)")
            for t in NEGATED[axiom]]
    lits = [l.replace("nullA ", "nullAddress ").replace("nullA)", "nullAddress)")
             .replace("nthA ", "nthAddress ") for l in lits]
    assert verdict(*lits) == "unsat", lits
