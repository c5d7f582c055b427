"""The seven acceptance criteria, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line which is repeated in the
terminal summary.
"""
import random
import time

from heapsmt.elaborator import elaborate_text, typecheck_term
from heapsmt.frontend import parse_script
from heapsmt.redgen import (
    MOTIVATION, brute_force, decode, emit_lemma2_instance, exhaustive_cnfs, random_cnf,
    sat_to_heap,
)
from heapsmt.semantics import (
    AXIOMS, Address, Bounds, Element, Evaluator, HeapOps, Interpretation, run_battery,
)
from heapsmt.sexpr import read_one
from heapsmt.solver import conjunction_from_text, solve
from heapsmt.solver.fuzz import differential
from heapsmt.transpiler import (
    TranspileConfig, leaked_symbols, run_array_battery, transpile_script,
)


def verdict_line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


def test_c1_axiom_battery(report_line):
    t0 = time.perf_counter()
    results = run_battery(Bounds(3, 3, 5))
    elapsed = time.perf_counter() - t0
    passed = [r for r in results if r.passed and r.counterexample is None]
    ok = len(passed) == len(AXIOMS) == 12 and elapsed < 60
    report_line(verdict_line(1, ok, f"axiom battery {len(passed)}/12 at 3:3:5 in {elapsed:.1f}s"))
    assert ok, [r.axiom for r in results if not r.passed]


def test_c2_defect_reproduction(report_line):
    bad = {r.axiom: r for r in run_array_battery(cfg=TranspileConfig.uncorrected())}
    good = {r.axiom: r for r in run_array_battery(cfg=TranspileConfig())}
    ext_fails = not bad["ext"].passed and bad["ext"].counterexample is not None
    cex = bad["cons"].counterexample or {}
    neg_addr = not bad["cons"].passed and isinstance(cex.get("p"), int) and cex["p"] < 0
    fixed = good["ext"].passed and good["cons"].passed
    ok = ext_fails and neg_addr and fixed
    report_line(verdict_line(
        2, ok, f"uncorrected: ext fails={ext_fails}, negative address unreachable={neg_addr}; "
               f"corrected: both pass={fixed}"))
    assert ok


def test_c3_solver_oracle_agreement(report_line):
    t0 = time.perf_counter()
    report = differential(1000, seed=2026)
    elapsed = time.perf_counter() - t0
    checked = report.checked
    agree = sum(1 for o in checked if o.solver == o.oracle)
    sat = [o for o in checked if o.solver == "sat"]
    models_ok = all(o.model_ok for o in sat)
    ok = len(checked) >= 1000 and agree == len(checked) and models_ok and elapsed < 600
    report_line(verdict_line(
        3, ok, f"{agree}/{len(checked)} agree ({len(sat)} sat, all models re-evaluate: "
               f"{models_ok}; {report.rejected} over oracle budget skipped) in {elapsed:.0f}s"))
    assert ok, report.disagreements[:3]


def _agrees(cnf):
    conj, _ = sat_to_heap(cnf)
    r = solve(conj)
    expected = brute_force(cnf) is not None
    if r.verdict != ("sat" if expected else "unsat"):
        return False
    return not expected or cnf.evaluate(decode(cnf, r.model))


def test_c4_cnf_reduction(report_line):
    exhaustive = [c for m in (1, 2, 3) for c in exhaustive_cnfs(m, 4)]
    rng = random.Random(4)
    randoms = [random_cnf(rng, max_vars=5, max_clauses=8) for _ in range(200)]
    bad = [c for c in exhaustive + randoms if not _agrees(c)]
    total = len(exhaustive) + len(randoms)
    ok = not bad
    report_line(verdict_line(
        4, ok, f"{total - len(bad)}/{total} agree ({len(exhaustive)} exhaustive up to "
               f"symmetry, {len(randoms)} random)"))
    assert ok, bad[:3]


def test_c5_interpolation_instance(report_line):
    inst = emit_lemma2_instance()
    t0 = time.perf_counter()
    got = tuple(solve(conjunction_from_text(t)).verdict
                for t in (inst.combined, inst.a, inst.b))
    elapsed = time.perf_counter() - t0
    ok = got == ("unsat", "sat", "sat") and elapsed < 5
    report_line(verdict_line(5, ok, f"A&B={got[0]}, A={got[1]}, B={got[2]} in {elapsed:.2f}s"))
    assert ok


def test_c6_fixture_pipeline(report_line):
    parse_script(MOTIVATION)
    elaborate_text(MOTIVATION)
    result = transpile_script(MOTIVATION)
    plain = elaborate_text(result.text, plain=True)
    leaked = leaked_symbols(result)
    ok = not leaked and not plain.table.heaps
    report_line(verdict_line(6, ok, f"fixture lowered, re-parsed in plain mode, "
                                    f"{len(leaked)} heap symbols left"))
    assert ok, leaked


def test_c7_allocation_determinism(report_line):
    script = elaborate_text("(declare-sort O 0)(declare-fun d () O)(declare-heap H A O d () ())")
    ev = Evaluator(script.table, Interpretation(values={"d": Element("O", 0)},
                                                universes={"O": 3}))
    ops = HeapOps(Element("O", 0), "AllocResultH")
    rng = random.Random(7)
    cases = failures = 0
    for _ in range(100):
        objs = [Element("O", rng.randrange(3)) for _ in range(rng.randrange(0, 7))]
        h, last = ops.empty(), ops.null()
        for o in objs:
            h, last = ops.allocate_pair(h, o)
        # i allocations from empty agree with the nthAddress term
        nth = ev.eval(typecheck_term(read_one(f"(_ nthA {len(objs)})"), script.table))
        # a second heap of the same size built from different objects
        other = ops.empty()
        for _ in objs:
            other = ops.allocate_pair(other, Element("O", rng.randrange(3)))[0]
        o1, o2 = (Element("O", rng.randrange(3)) for _ in range(2))
        same_fresh = ops.allocate_pair(h, o1)[1] == ops.allocate_pair(other, o2)[1]
        cases += 1
        if nth != last or nth != Address(len(objs)) or not same_fresh:
            failures += 1
    ok = failures == 0
    report_line(verdict_line(7, ok, f"{cases - failures}/{cases} allocation sequences"))
    assert ok
