import pytest

from heapsmt import terms as T
from heapsmt.elaborator import (
    ADT, ALLOC_RESULT, ADDRESS, HEAP_SORT, elaborate_text, mangle_names, typecheck_term,
)
from heapsmt.errors import ElaborationError, SortError
from heapsmt.redgen import MOTIVATION
from heapsmt.semantics import AXIOMS, axiom_formula, battery_signature
from heapsmt.sexpr import read_one

SIMPLE = "(declare-sort O 0)(declare-fun d () O)(declare-heap H A O d () ())"


def typed(text, env, script=SIMPLE):
    table = elaborate_text(script).table
    return typecheck_term(read_one(text), table, {k: T.Sort(v) for k, v in env.items()})


def test_motivating_example_signature():
    s = elaborate_text(MOTIVATION)
    sig = s.table.heaps["Heap"]
    assert sig.address_sort.name == "Addr"
    assert sig.alloc_result_sort.name == "AllocationResultHeap"
    assert sig.names["nullAddress"] == "nullAddr"
    assert sig.names["emptyHeap"] == "emptyHeap"
    kinds = {n: s.table.sorts[n].kind for n in ("Heap", "Addr", "AllocationResultHeap")}
    assert kinds == {"Heap": HEAP_SORT, "Addr": ADDRESS, "AllocationResultHeap": ALLOC_RESULT}
    objects = [n for n in ("Object", "IntList", "Cons", "Nil") if s.table.sorts[n].kind == ADT]
    assert len(objects) == 4


def test_alloc_result_has_one_constructor_with_two_fields():
    table = elaborate_text(MOTIVATION).table
    (ctor,) = table.datatypes["AllocationResultHeap"].constructors
    assert ctor.name == "AllocResultHeap"
    assert [f for f, _ in ctor.fields] == ["_1", "_2"]


def test_mangling():
    assert mangle_names("Heap", "A")["nullAddress"] == "nullA"
    m = mangle_names("Heap", "Addr")
    assert m["AllocationResult"] == "AllocationResultHeap"
    assert m["nthAddress"] == "nthAddr"
    assert all(m[k] == k for k in ("read", "write", "allocate", "valid"))


def test_mangled_name_collides_with_user_symbol():
    with pytest.raises(ElaborationError, match="nullAddr"):
        elaborate_text("(declare-fun nullAddr () Int)" + MOTIVATION)


def test_heap_and_address_names_collide():
    with pytest.raises(ElaborationError):
        elaborate_text("(declare-sort O 0)(declare-fun d () O)(declare-heap H H O d () ())")


def test_object_sort_may_not_be_the_heap():
    with pytest.raises(ElaborationError, match="object sort"):
        elaborate_text("(declare-heap H A H d () ())")


def test_heaps_are_not_storable():
    with pytest.raises(ElaborationError):
        elaborate_text("(declare-heap H A O (E) ((O 0)) (((E) (Box (inner H)))))")


def test_builtin_object_sort():
    s = elaborate_text("(declare-heap H A Int 0 () ())")
    assert s.table.heaps["H"].object_sort == T.INT


def test_default_object_must_be_closed_and_well_sorted():
    with pytest.raises((ElaborationError, SortError)):
        elaborate_text("(declare-sort O 0)(declare-heap H A O x () ())")
    with pytest.raises((ElaborationError, SortError)):
        elaborate_text("(declare-sort O 0)(declare-heap H A O 3 () ())")


def test_read_has_object_sort():
    assert typed("(read h a)", {"h": "H", "a": "A"}).sort == T.Sort("O")


def test_valid_of_write_is_bool():
    t = typed("(valid (write h a o) a)", {"h": "H", "a": "A", "o": "O"})
    assert t.sort == T.BOOL


def test_allocate_returns_pair():
    t = typed("(allocate h o)", {"h": "H", "o": "O"})
    assert t.sort == T.Sort("AllocationResultH")
    assert typed("(_2 (allocate h o))", {"h": "H", "o": "O"}).sort == T.Sort("A")


def test_no_address_arithmetic():
    with pytest.raises(SortError):
        typed("(+ a 1)", {"a": "A"})


def test_cross_heap_application_names_both_sorts():
    script = SIMPLE + "(declare-heap H2 A2 O d () ())"
    with pytest.raises(SortError) as e:
        typed("(read h a)", {"h": "H", "a": "A2"}, script)
    assert "A2" in str(e.value) and "A" in str(e.value)


def test_testers_and_selectors_available():
    s = elaborate_text(MOTIVATION)
    env = {"h": T.Sort("Heap"), "l": T.Sort("Addr")}
    for text in ["((_ is O_Cons) (read h l))", "(is-O_Nil (read h l))"]:
        assert typecheck_term(read_one(text), s.table, env).sort == T.BOOL
    t = typecheck_term(read_one("(head (getCons (read h l)))"), s.table, env)
    assert t.sort == T.INT


def test_every_axiom_is_expressible():
    _, sig = battery_signature()
    for name in AXIOMS:
        if name != "cons":
            assert axiom_formula(sig, name).sort == T.BOOL


def test_elaboration_is_deterministic():
    a, b = elaborate_text(MOTIVATION), elaborate_text(MOTIVATION)
    assert list(a.table.sorts) == list(b.table.sorts)
    assert list(a.table.functions) == list(b.table.functions)
