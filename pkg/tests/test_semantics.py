import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from heapsmt.elaborator import elaborate_text, typecheck_term
from heapsmt.errors import EvaluationError
from heapsmt.semantics import (
    AXIOMS, Address, AdtValue, ArrayValue, Bounds, Element, Evaluator, HeapOps, HeapValue,
    Interpretation, allocate_n, check_axiom, interpretation_from_json, interpretation_to_json,
    run_battery,
)
from heapsmt.sexpr import read_one

D = Element("O", 0)
OPS = HeapOps(D, "AllocResultH")
OBJS = [Element("O", i) for i in range(3)]
SCRIPT = "(declare-sort O 0)(declare-fun d () O)(declare-heap H A O d () ())"

objects = st.sampled_from(OBJS)
heaps = st.lists(objects, max_size=4).map(lambda xs: HeapValue.of(*xs))
addrs = st.integers(min_value=0, max_value=6).map(Address)


def ev_text(text, values=None, universes=None):
    s = elaborate_text(SCRIPT)
    interp = Interpretation(values=values or {"d": D}, universes=universes or {"O": 3})
    ev = Evaluator(s.table, interp)
    return ev.eval(typecheck_term(read_one(text), s.table))


# the reference operations

def test_empty_heap():
    assert OPS.empty() == HeapValue(0, ())
    assert not OPS.valid(OPS.empty(), Address(3))
    assert OPS.read(OPS.empty(), Address(1)) == D


def test_validity_range():
    h = HeapValue.of(OBJS[1], OBJS[2])
    assert OPS.valid(h, Address(1))
    assert not OPS.valid(h, Address(0))
    assert not OPS.valid(h, Address(3))


def test_first_allocation():
    assert OPS.allocate_pair(OPS.empty(), D) == (HeapValue(1, (D,)), Address(1))


@given(heaps, heaps, objects, objects)
def test_equal_sizes_allocate_equal_addresses(h1, h2, o1, o2):
    a1 = OPS.allocate_pair(h1, o1)[1]
    a2 = OPS.allocate_pair(h2, o2)[1]
    assert (a1 == a2) == (h1.size == h2.size)


@given(st.integers(min_value=0, max_value=8))
def test_nth_address_is_ith_allocation(i):
    assert allocate_n(OPS, i)[1] == OPS.nth(i)


@given(heaps, objects)
def test_allocate_properties(h, o):
    h2, a = OPS.allocate_pair(h, o)
    assert h2.size == h.size + 1 and h2.is_canonical()
    assert OPS.read(h2, a) == o
    assert not OPS.valid(h, a) and OPS.valid(h2, a)


@given(heaps, addrs, objects)
def test_write(h, a, o):
    w = OPS.write(h, a, o)
    assert w.is_canonical()
    if not OPS.valid(h, a):
        assert w == h
    else:
        assert w.size == h.size
        diff = [i for i in range(h.size) if w.contents[i] != h.contents[i]]
        assert diff in ([], [a.index - 1])
        assert OPS.read(w, a) == o


@given(heaps, addrs, addrs, objects)
def test_read_over_write(h, p1, p2, o):
    w = OPS.write(h, p1, o)
    if p1 == p2 and OPS.valid(h, p1):
        assert OPS.read(w, p2) == o
    if p1 != p2:
        assert OPS.read(w, p2) == OPS.read(h, p2)
    assert OPS.read(h, Address(0)) == D


def test_write_write_same_address_exhaustive():
    for n in range(4):
        for contents in itertools.product(OBJS, repeat=n):
            h = HeapValue.of(*contents)
            for a in range(1, n + 1):
                for o1, o2 in itertools.product(OBJS, repeat=2):
                    p = Address(a)
                    assert OPS.write(OPS.write(h, p, o1), p, o2) == OPS.write(h, p, o2)


# evaluation

def test_eval_allocated_address_is_valid():
    assert ev_text("(valid (_1 (allocate emptyH d)) (_2 (allocate emptyH d)))") is True


def test_eval_read_empty_gives_default():
    assert ev_text("(read emptyH (_ nthA 1))") == D


def test_eval_entry_clause_of_motivating_example():
    from heapsmt.redgen import MOTIVATION
    from heapsmt.semantics import FunctionTable
    s = elaborate_text(MOTIVATION)
    m = Interpretation(functions={"Inv1": FunctionTable(False, {(HeapValue(0, ()),): True})})
    ev = Evaluator(s.table, m)
    assert ev.eval(s.assertions[0]) is True


def test_unassigned_constant():
    s = elaborate_text(SCRIPT + "(declare-const p A)")
    with pytest.raises(EvaluationError, match="p"):
        Evaluator(s.table, Interpretation(values={"d": D})).eval(
            typecheck_term(read_one("(valid emptyH p)"), s.table))


def test_wrong_selector_gives_designated_value():
    s = elaborate_text(
        "(declare-datatypes ((L 0)) (((nil) (cons (hd Int) (tl L)))))"
        "(declare-heap H A L nil () ())")
    ev = Evaluator(s.table, Interpretation())
    assert ev.eval(typecheck_term(read_one("(hd nil)"), s.table)) == 0
    assert ev.eval(typecheck_term(read_one("(tl nil)"), s.table)) == AdtValue("nil", ())


def test_quantifier_over_bounded_heaps():
    assert ev_text("(forall ((h H) (p A)) (=> (valid h p) (not (= p nullA))))") is True
    assert ev_text("(exists ((h H)) (valid h (_ nthA 2)))") is True


def test_evaluation_is_deterministic():
    text = "(= (read (write (_1 (allocate emptyH d)) (_ nthA 1) d) (_ nthA 1)) d)"
    assert ev_text(text) == ev_text(text) is True


# interpretations as JSON

values = st.recursive(
    st.one_of(st.booleans(), st.integers(-5, 5), addrs, objects),
    lambda kids: st.one_of(
        st.lists(kids, max_size=3).map(lambda xs: HeapValue.of(*xs)),
        st.tuples(st.sampled_from(["A", "B"]), st.lists(kids, max_size=2)).map(
            lambda t: AdtValue(t[0], tuple(t[1]))),
        st.tuples(kids, st.dictionaries(st.integers(0, 4), kids, max_size=3)).map(
            lambda t: ArrayValue.make(t[0], t[1])),
    ),
    max_leaves=10,
)


@settings(max_examples=150)
@given(st.dictionaries(st.from_regex(r"[a-z]{1,4}", fullmatch=True), values, max_size=4))
def test_interpretation_json_round_trip(vals):
    m = Interpretation(values=vals, universes={"O": 3})
    doc = json.loads(json.dumps(interpretation_to_json(m)))
    assert doc["v"] == 1
    back = interpretation_from_json(doc)
    assert back.values == vals and back.universes == {"O": 3}


def test_unknown_schema_version():
    with pytest.raises(EvaluationError):
        interpretation_from_json({"v": 2})


# the battery

def test_bounds_parse():
    assert Bounds.parse("3:3:5") == Bounds(3, 3, 5)
    with pytest.raises(ValueError):
        Bounds.parse("3:0:5")


@pytest.mark.parametrize("axiom", ["vld1", "vld2", "ivrd", "ivwt", "row1", "row2"])
def test_single_axioms_pass(axiom):
    assert check_axiom(axiom).passed


def test_cons_uses_canonical_witness():
    r = check_axiom("cons")
    assert r.passed and r.counterexample is None and r.checked > 5


def test_battery_small_bounds():
    results = run_battery(Bounds(2, 2, 3))
    assert [r.axiom for r in results] == list(AXIOMS)
    assert all(r.passed for r in results)


class LeakyWrite(HeapOps):
    """Writes just past the end leave junk behind instead of being ignored."""

    def write(self, h, a, o):
        if a.index == h.size + 1:
            return HeapValue(h.size, tuple(h.contents) + (o,))
        return super().write(h, a, o)


def test_leaky_write_breaks_extensionality():
    r = check_axiom("ext", Bounds(2, 2, 3), LeakyWrite(None, "AllocResultHeap"))
    assert not r.passed
    h1, h2 = r.counterexample["h1"], r.counterexample["h2"]
    assert h1.size == h2.size and not (h1.is_canonical() and h2.is_canonical())


def test_leaky_write_keeps_other_axioms():
    assert check_axiom("row1", Bounds(2, 2, 3), LeakyWrite(None, "AllocResultHeap")).passed
