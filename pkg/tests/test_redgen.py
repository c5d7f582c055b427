import random

import pytest

from heapsmt.elaborator import elaborate_text
from heapsmt.errors import GenerationError
from heapsmt.frontend import parse_script
from heapsmt.redgen import (
    Cnf, brute_force, decode, emit_fixtures, emit_lemma2_instance, exhaustive_cnfs,
    random_cnf, read_dimacs, sat_to_heap, sat_to_heap_text,
)
from heapsmt.solver import conjunction_from_text, purify, solve


def test_dimacs_round_trip():
    text = "c example\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n"
    cnf = read_dimacs(text)
    assert cnf == Cnf.of(3, [[1, -2], [2, 3, -1]])
    assert read_dimacs(cnf.to_dimacs()) == cnf


@pytest.mark.parametrize("text", ["1 2 0\n", "p cnf 2 1\n1 x 0\n", "p cnf 1 1\n0\n"])
def test_bad_dimacs(text):
    with pytest.raises(GenerationError):
        read_dimacs(text)


def test_cnf_validation():
    with pytest.raises(GenerationError):
        Cnf.of(0, [[1]])
    with pytest.raises(GenerationError):
        Cnf.of(2, [[3]])
    with pytest.raises(GenerationError):
        Cnf.of(2, [[]])


def test_both_polarities_write_the_read_back_cell():
    text = sat_to_heap_text(Cnf.of(1, [[1, -1]]))
    assert "(assert (= T (read (write h (_ nthAddress 1) T) (_ nthAddress 1))))" in text


def test_absent_variables_write_to_null():
    text = sat_to_heap_text(Cnf.of(3, [[2]]))
    assert "(write (write (write h nullAddress T) a2 T) nullAddress T)" in text


def test_encoding_shape():
    text = sat_to_heap_text(Cnf.of(2, [[1], [-2]]))
    assert "(assert (not (= T F)))" in text
    assert "(assert (= h (_1 (allocate (_1 (allocate emptyHeap F)) F))))" in text
    assert "(assert (and (valid h a2) (valid h abar2) (not (= a2 abar2))))" in text
    assert text.count("(read ") == 2


def test_contradiction_is_unsat():
    c, _ = sat_to_heap(Cnf.of(1, [[1], [-1]]))
    assert brute_force(Cnf.of(1, [[1], [-1]])) is None
    assert solve(c).verdict == "unsat"


def test_satisfiable_clause_decodes():
    cnf = Cnf.of(2, [[1, 2]])
    c, _ = sat_to_heap(cnf)
    r = solve(c)
    assert r.verdict == "sat"
    assert cnf.evaluate(decode(cnf, r.model))


def test_encoding_stays_in_fragment():
    rng = random.Random(4)
    for _ in range(20):
        c, _ = sat_to_heap(random_cnf(rng))
        purify(c)


def test_exhaustive_enumeration_counts():
    # one variable: clauses {x}, {-x}, {x,-x}; up to polarity flips
    got = list(exhaustive_cnfs(1, 3))
    assert len(got) == 5
    assert all(len(set(c.clauses)) == len(c.clauses) for c in got)


def test_exhaustive_two_variables_agree():
    for cnf in exhaustive_cnfs(2, 3):
        c, _ = sat_to_heap(cnf)
        r = solve(c)
        assert (r.verdict == "sat") == (brute_force(cnf) is not None), cnf
        if r.verdict == "sat":
            assert cnf.evaluate(decode(cnf, r.model))


def test_interpolation_instance_parts():
    inst = emit_lemma2_instance()
    assert "(assert (= h2 (write h1 p1 o1)))" in inst.a
    assert "(assert (not (= p2 p3)))" in inst.b
    assert inst.combined.count("(assert") == inst.a.count("(assert") + inst.b.count("(assert")
    for text in (inst.a, inst.b, inst.combined):
        conjunction_from_text(text)


def test_fixtures(tmp_path):
    paths = emit_fixtures(tmp_path)
    assert sorted(p.name for p in paths) == ["ext-defect.smt2", "motivation.plain.smt2",
                                             "motivation.smt2"]
    for p in paths:
        text = p.read_text()
        parse_script(text)
        elaborate_text(text, plain=p.name.endswith(".plain.smt2"))


def test_fixture_declares_four_object_datatypes():
    s = elaborate_text((emit_fixtures.__globals__["MOTIVATION"]))
    names = [n for n in s.table.datatypes if n != "AllocationResultHeap"]
    assert sorted(names) == ["Cons", "IntList", "Nil", "Object"]
