import pytest
from hypothesis import given, settings, strategies as st

from heapsmt.errors import LexError, ParseError
from heapsmt.frontend import DeclareHeap, OpaqueCommand, parse_script, print_script
from heapsmt.redgen import MOTIVATION, fixture_texts
from heapsmt.sexpr import Numeral, SList, Symbol, Keyword, read, to_text, tokenize


def kinds(text):
    return [repr(t) for t in tokenize(text)]


def test_tokenize_check_sat():
    assert kinds("(check-sat)") == ["LParen", "Symbol(check-sat)", "RParen"]


def test_tokenize_indexed_identifier():
    assert kinds("(_ nthAddr 1)") == ["LParen", "Symbol(_)", "Symbol(nthAddr)", "Numeral(1)", "RParen"]


def test_unbalanced_input_lexes_fine_but_fails_to_parse():
    toks = tokenize("(declare-heap Heap Addr")
    assert len(toks) == 4
    with pytest.raises(ParseError):
        parse_script(toks)


def test_comments_and_spans():
    toks = tokenize("; hello\n  (assert |odd sym|)")
    assert toks[0].span.line == 2 and toks[0].span.column == 3
    assert toks[2].text == "odd sym"


@pytest.mark.parametrize("text", ['(assert "abc', "(declare-fun |x () Int)"])
def test_unterminated_quotes(text):
    with pytest.raises(LexError) as e:
        tokenize(text)
    assert e.value.span is not None


def test_motivating_declaration_shape():
    cmds = parse_script(MOTIVATION)
    heap = [c for c in cmds if isinstance(c, DeclareHeap)]
    assert len(heap) == 1
    d = heap[0].decl
    assert (d.heap_sort, d.addr_sort, to_text(d.object_sort)) == ("Heap", "Addr", "Object")
    assert [n for n, _ in d.sort_decs] == ["Object", "IntList", "Cons", "Nil"]


def test_heap_declaration_without_sorts():
    d = parse_script("(declare-heap H A O (O_E) () ())")[0].decl
    assert d.sort_decs == () and d.constructor_decs == ()
    assert to_text(d.default_object) == "(O_E)"


@pytest.mark.parametrize("text", [
    "(declare-heap H A O (O_E) ((X 0)) ())",   # one sort, no constructor list
    "(declare-heap H A O)",                     # default object missing
    "(declare-heap H A O d ((X -1)) (((c))))",  # negative arity
])
def test_malformed_heap_declarations(text):
    with pytest.raises(ParseError) as e:
        parse_script(text)
    assert "declare-heap" in str(e.value)


def test_error_spans_stay_inside_input():
    text = "(assert true)\n(declare-heap H A O (O_E) ((X 0)) ())"
    with pytest.raises(ParseError) as e:
        parse_script(text)
    lines = text.splitlines()
    assert 1 <= e.value.span.line <= len(lines)
    assert 1 <= e.value.span.column <= len(lines[e.value.span.line - 1])


def test_print_empty():
    assert print_script([]) == ""


def test_motivating_example_round_trip():
    cmds = parse_script(MOTIVATION)
    assert parse_script(print_script(cmds)) == cmds


def test_transpiled_fixture_reaches_fixed_point():
    once = print_script(parse_script(fixture_texts()["motivation.plain.smt2"]))
    assert print_script(parse_script(once)) == once


def test_unknown_commands_pass_through():
    text = "(set-info :source |x|)\n(frobnicate 1 (2 3) :k)\n(check-sat)\n"
    cmds = parse_script(text)
    assert isinstance(cmds[1], OpaqueCommand) and cmds[1].name == "frobnicate"
    assert parse_script(print_script(cmds)) == cmds
    assert "(frobnicate 1 (2 3) :k)" in print_script(cmds)


# round trip on generated trees

symbols = st.from_regex(r"[a-z][a-z0-9_\-]{0,6}", fullmatch=True)
atoms = st.one_of(
    symbols.map(Symbol),
    st.integers(min_value=0, max_value=10**30).map(Numeral),
    symbols.map(Keyword),
)
trees = st.recursive(atoms, lambda kids: st.lists(kids, max_size=5).map(lambda xs: SList(tuple(xs))),
                     max_leaves=30)


@settings(max_examples=200, deadline=None)
@given(st.lists(trees.filter(lambda t: isinstance(t, SList)), max_size=4))
def test_sexpr_print_parse_identity(forms):
    text = "\n".join(to_text(f) for f in forms)
    assert read(text) == forms


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_fuzz_scripts_round_trip(seed):
    import random
    from heapsmt.solver.fuzz import random_script
    once = parse_script(random_script(random.Random(seed)))
    assert parse_script(print_script(once)) == once
