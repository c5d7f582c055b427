import io
import json
import subprocess
import sys

import pytest

from heapsmt.cli import main
from heapsmt.redgen import EXT_DEFECT, MOTIVATION, emit_lemma2_instance

PREAMBLE = "(declare-sort O 0)(declare-fun d () O)(declare-heap H A O d () ())"


def run(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def test_check(files):
    assert run("check", files("m.smt2", MOTIVATION))[0] == 0
    code, out, err = run("check", files("bad.smt2", "(assert (valid"))
    assert code == 1 and out == "" and "error" in err


def test_check_plain_rejects_heaps(files):
    assert run("check", "--plain", files("m.smt2", MOTIVATION))[0] == 1


def test_transpile(files):
    code, out, _ = run("transpile", files("m.smt2", MOTIVATION))
    assert code == 0 and "hp_HeapCtor" in out and "declare-heap" not in out


def test_transpile_uncorrected(files):
    code, out, _ = run("transpile", "--uncorrected", files("e.smt2", EXT_DEFECT))
    assert code == 0 and "heapEq" not in out


def test_solve_exit_codes(files):
    inst = emit_lemma2_instance()
    assert run("solve", files("a.smt2", inst.a))[:2] == (10, "sat\n")
    assert run("solve", files("ab.smt2", inst.combined))[:2] == (20, "unsat\n")
    unk = PREAMBLE + "(declare-const h H)(declare-const p A)(declare-const q A)" \
                     "(assert (valid h p))(assert (valid h q))(assert (not (= p q)))"
    assert run("solve", "--budget", "1", files("u.smt2", unk))[0] == 30


def test_budget_from_environment(files, monkeypatch):
    unk = PREAMBLE + "(declare-const h H)(declare-const p A)(declare-const q A)" \
                     "(assert (valid h p))(assert (valid h q))(assert (not (= p q)))"
    path = files("u.smt2", unk)
    monkeypatch.setenv("HEAPSMT_BUDGET", "1")
    assert run("solve", path)[0] == 30
    monkeypatch.setenv("HEAPSMT_BUDGET", "100000")
    assert run("solve", path)[0] == 10


def test_solve_json_model(files):
    code, out, err = run("solve", "--format", "json", files("b.smt2", emit_lemma2_instance().b))
    doc = json.loads(out)
    assert code == 10 and err == ""
    assert doc["v"] == 1 and doc["verdict"] == "sat" and doc["model"]["v"] == 1


def test_solve_outside_fragment_is_input_error(files):
    text = PREAMBLE + "(declare-const h H)(assert (forall ((p A)) (valid h p)))"
    code, out, err = run("solve", files("q.smt2", text))
    assert code == 1 and out == "" and "fragment" in err


def test_eval_round_trip(files, tmp_path):
    script = files("b.smt2", emit_lemma2_instance().b)
    _, out, _ = run("solve", "--format", "json", script)
    model = tmp_path / "model.json"
    model.write_text(json.dumps(json.loads(out)["model"]))
    code, out, _ = run("eval", script, "--model", str(model), "--term", "(valid h1 p2)")
    assert (code, out) == (0, "true\n")
    code, out, _ = run("eval", script, "--model", str(model), "--term", "(read emptyHeap p2)",
                       "--format", "json")
    assert json.loads(out)["value"] == {"elem": ["O", 0]}


def test_gen(tmp_path, files):
    dimacs = files("f.cnf", "p cnf 2 2\n1 2 0\n-1 0\n")
    code, out, _ = run("gen", "sat-reduction", "--dimacs", dimacs)
    assert code == 0 and "(_ nthAddress 1)" in out
    assert run("gen", "lemma2", "--out", str(tmp_path / "l2"))[0] == 0
    assert sorted(p.name for p in (tmp_path / "l2").iterdir()) == [
        "lemma2-A.smt2", "lemma2-AB.smt2", "lemma2-B.smt2"]
    assert run("gen", "fixtures", "--out", str(tmp_path / "fx"))[0] == 0
    assert run("check", str(tmp_path / "fx" / "motivation.smt2"))[0] == 0


def test_gen_sat_reduction_needs_dimacs():
    code, _, err = run("gen", "sat-reduction")
    assert code == 2 and "--dimacs" in err


def test_axioms_table():
    code, out, _ = run("axioms", "--bounds", "2:2:3")
    assert code == 0 and out.strip().endswith("12/12 pass")


def test_axioms_uncorrected_reports_ext():
    code, out, _ = run("axioms", "--uncorrected")
    line = next(l for l in out.splitlines() if l.startswith("ext"))
    assert code == 1 and "FAIL" in line and "h1=" in line


def test_axioms_json():
    code, out, _ = run("axioms", "--array", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["v"] == 1 and doc["passed"] == doc["total"] == 12


@pytest.mark.parametrize("argv", [[], ["frob"], ["axioms", "--bounds", "1:0:1"],
                                  ["solve", "--format", "xml"], ["solve", "--budget", "0"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_many_files_in_order(files):
    inst = emit_lemma2_instance()
    paths = [files(f"f{i}.smt2", t) for i, t in enumerate([inst.a, inst.combined, inst.b] * 3)]
    code, out, _ = run("solve", *paths)
    assert out.split() == ["sat", "unsat", "sat"] * 3
    assert code == 20


def test_deterministic_output(files):
    path = files("b.smt2", emit_lemma2_instance().b)
    first = run("solve", "--model", "--seed", "3", path)
    assert all(run("solve", "--model", "--seed", "3", path) == first for _ in range(3))
    a = run("gen", "fuzz", "--seed", "7", "--count", "3")
    assert a == run("gen", "fuzz", "--seed", "7", "--count", "3")


def test_console_script_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "heapsmt.cli", "check",
                           files("m.smt2", MOTIVATION)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stderr == ""
