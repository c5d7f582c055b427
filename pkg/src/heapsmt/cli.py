"""Command line front end: check, transpile, solve, eval, gen, axioms.

Exit codes: 0 success, 1 bad input, 2 usage, 10 sat, 20 unsat, 30 unknown,
70 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import HeapSmtError
from .semantics import (
    AdtValue, Address, ArrayValue, Bounds, Element, HeapValue,
    interpretation_from_json, interpretation_to_json, value_to_json,
)

EXIT_OK, EXIT_INPUT, EXIT_USAGE = 0, 1, 2
EXIT_SAT, EXIT_UNSAT, EXIT_UNKNOWN = 10, 20, 30
EXIT_INTERNAL = 70
VERDICT_CODES = {"sat": EXIT_SAT, "unsat": EXIT_UNSAT, "unknown": EXIT_UNKNOWN}


class _Outcome:
    """What one unit of work prints and how it wants the process to exit."""

    def __init__(self, code=EXIT_OK, out="", err="", doc=None):
        self.code = code
        self.out = out
        self.err = err
        self.doc = doc  # JSON document for --format json


def show(v) -> str:
    """Values in an s-expression flavoured text form."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v) if v >= 0 else f"(- {-v})"
    if isinstance(v, Address):
        return f"(addr {v.index})"
    if isinstance(v, HeapValue):
        return f"(heap {v.size} ({' '.join(show(o) for o in v.contents)}))"
    if isinstance(v, Element):
        return f"{v.sort}!{v.index}"
    if isinstance(v, AdtValue):
        if not v.args:
            return v.ctor
        return f"({v.ctor} {' '.join(show(a) for a in v.args)})"
    if isinstance(v, ArrayValue):
        entries = " ".join(f"({show(k)} {show(x)})" for k, x in v.entries)
        return f"(array {show(v.default)} ({entries}))"
    return repr(v)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _guard(fn, *args) -> _Outcome:
    """Map exceptions onto exit codes; a verdict never goes to stderr."""
    from .solver import InternalError
    try:
        return fn(*args)
    except _UsageError:
        raise
    except InternalError as e:
        return _Outcome(EXIT_INTERNAL, err=f"internal error: {e}\n")
    except (HeapSmtError, OSError, ValueError, json.JSONDecodeError) as e:
        return _Outcome(EXIT_INPUT, err=f"error: {e}\n")
    except Exception:  # an invariant broke somewhere
        return _Outcome(EXIT_INTERNAL, err="internal error:\n" + traceback.format_exc())


def _per_file(args, work) -> list[_Outcome]:
    files = args.files or ["-"]
    if len(files) == 1 or "-" in files:
        return [_guard(work, f, args) for f in files]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(lambda f: _guard(work, f, args), files))


def _combine(outcomes: list[_Outcome]) -> int:
    codes = [o.code for o in outcomes]
    for bad in (EXIT_INTERNAL, EXIT_INPUT):
        if bad in codes:
            return bad
    return max(codes)


# check ------------------------------------------------------------------------

def _check_one(path: str, args) -> _Outcome:
    from .elaborator import elaborate_text
    script = elaborate_text(_read(path), plain=args.plain)
    doc = {"v": 1, "file": path, "ok": True, "heaps": sorted(script.table.heaps),
           "assertions": len(script.assertions)}
    return _Outcome(EXIT_OK, out=f"{path}: ok\n", doc=doc)


# transpile --------------------------------------------------------------------

def _transpile_one(path: str, args) -> _Outcome:
    from .transpiler import TranspileConfig, transpile_text
    cfg = TranspileConfig.uncorrected() if args.uncorrected else TranspileConfig()
    if args.prefix:
        cfg = TranspileConfig(cfg.emit_heap_eq, cfg.emit_wf_guards, args.prefix, cfg.const_empty_array)
    text = transpile_text(_read(path), cfg)
    return _Outcome(EXIT_OK, out=text, doc={"v": 1, "file": path, "smt2": text})


# solve ------------------------------------------------------------------------

def _solve_one(path: str, args) -> _Outcome:
    from .solver import conjunction_from_text, solve
    res = solve(conjunction_from_text(_read(path)), args.budget)
    doc = {"v": 1, "file": path, "verdict": res.verdict,
           "model": interpretation_to_json(res.model) if res.model is not None else None,
           "stats": res.stats}
    lines = [res.verdict]
    if res.model is not None and args.model:
        lines += [f"  {k} = {show(v)}" for k, v in sorted(res.model.values.items())]
    return _Outcome(VERDICT_CODES[res.verdict], out="\n".join(lines) + "\n", doc=doc)


# eval -------------------------------------------------------------------------

def _eval_one(path: str, args) -> _Outcome:
    from .elaborator import elaborate_text, typecheck_term
    from .semantics import Evaluator
    from .sexpr import read_one
    script = elaborate_text(_read(path))
    interp = interpretation_from_json(json.loads(Path(args.model).read_text()))
    term = typecheck_term(read_one(args.term), script.table)
    value = Evaluator(script.table, interp).eval(term)
    return _Outcome(EXIT_OK, out=show(value) + "\n",
                    doc={"v": 1, "term": args.term, "value": value_to_json(value)})


# gen --------------------------------------------------------------------------

def _gen(args) -> _Outcome:
    from . import redgen
    if args.what == "sat-reduction":
        if not args.dimacs:
            raise _UsageError("gen sat-reduction needs --dimacs FILE")
        cnf = redgen.read_dimacs(_read(args.dimacs))
        files = {Path(args.dimacs).stem + ".smt2": redgen.sat_to_heap_text(cnf)}
    elif args.what == "lemma2":
        inst = redgen.emit_lemma2_instance()
        files = {"lemma2-A.smt2": inst.a, "lemma2-B.smt2": inst.b,
                 "lemma2-AB.smt2": inst.combined}
    elif args.what == "fixtures":
        files = redgen.fixture_texts(args.uncorrected)
    elif args.what == "fuzz":
        from .solver.fuzz import random_script
        rng = random.Random(args.seed)
        files = {f"fuzz-{args.seed}-{i:04d}.smt2": random_script(rng) for i in range(args.count)}
    else:  # random-cnf
        rng = random.Random(args.seed)
        files = {f"cnf-{args.seed}-{i:04d}.cnf": redgen.random_cnf(rng).to_dimacs()
                 for i in range(args.count)}
    if args.out is None:
        text = "".join(f"; --- {name}\n{body}" if len(files) > 1 else body
                       for name, body in files.items())
        return _Outcome(EXIT_OK, out=text, doc={"v": 1, "files": files})
    written = redgen.write_files(args.out, files)
    return _Outcome(EXIT_OK, out="".join(f"{p}\n" for p in written),
                    doc={"v": 1, "written": [str(p) for p in written]})


# axioms -----------------------------------------------------------------------

def _axioms(args) -> _Outcome:
    from .semantics import run_battery
    from .transpiler import ARRAY_BOUNDS, TranspileConfig, run_array_battery
    array = args.array or args.uncorrected
    if array:
        bounds = args.bounds or ARRAY_BOUNDS
        cfg = TranspileConfig.uncorrected() if args.uncorrected else TranspileConfig()
        results = run_array_battery(bounds, cfg)
        mode = "array-uncorrected" if args.uncorrected else "array"
    else:
        bounds = args.bounds or Bounds()
        results = run_battery(bounds)
        mode = "heap"
    passed = sum(r.passed for r in results)
    lines = [f"semantics: {mode}  bounds: {bounds}", f"{'axiom':8} {'result':6} counterexample"]
    for r in results:
        cex = ""
        if r.counterexample is not None:
            cex = " ".join(f"{k}={show(v)}" for k, v in r.counterexample.items())
            if r.note:
                cex += f"  ({r.note})"
        lines.append(f"{r.axiom:8} {'pass' if r.passed else 'FAIL':6} {cex}".rstrip())
    lines.append(f"{passed}/{len(results)} pass")
    doc = {"v": 1, "mode": mode, "bounds": str(bounds), "passed": passed,
           "total": len(results), "results": [r.to_json() for r in results]}
    return _Outcome(EXIT_OK if passed == len(results) else EXIT_INPUT,
                    out="\n".join(lines) + "\n", doc=doc)


# plumbing ---------------------------------------------------------------------

class _UsageError(Exception):
    pass


def _bounds(text: str) -> Bounds:
    try:
        return Bounds.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _default_budget() -> int:
    from .solver import DEFAULT_BUDGET
    raw = os.environ.get("HEAPSMT_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_BUDGET


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=None,
                        help="solver node budget (default: $HEAPSMT_BUDGET or built in)")

    p = argparse.ArgumentParser(prog="heapsmt", description="Tools for SMT-LIB scripts with declare-heap.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="parse and elaborate")
    c.add_argument("files", nargs="*")
    c.add_argument("--plain", action="store_true", help="reject heap declarations")

    t = sub.add_parser("transpile", parents=[common], help="lower heaps to arrays and datatypes")
    t.add_argument("files", nargs="*")
    t.add_argument("--uncorrected", action="store_true",
                   help="omit the heap equality and well-formedness guards")
    t.add_argument("--prefix", default=None)

    s = sub.add_parser("solve", parents=[common], help="decide a conjunction of heap literals")
    s.add_argument("files", nargs="*")
    s.add_argument("--model", action="store_true", help="print the model when sat")

    e = sub.add_parser("eval", parents=[common], help="evaluate a ground term under an interpretation")
    e.add_argument("files", nargs=1, metavar="file")
    e.add_argument("--model", required=True, help="interpretation JSON file")
    e.add_argument("--term", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate benchmark files")
    g.add_argument("what", choices=("sat-reduction", "lemma2", "fixtures", "fuzz", "random-cnf"))
    g.add_argument("--dimacs")
    g.add_argument("--out", default=None, help="directory to write into (default: stdout)")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--uncorrected", action="store_true")

    a = sub.add_parser("axioms", parents=[common], help="check the axioms on bounded models")
    a.add_argument("--bounds", type=_bounds, default=None, metavar="H:O:A")
    a.add_argument("--array", action="store_true", help="check the array encoding instead")
    a.add_argument("--uncorrected", action="store_true",
                   help="array encoding without the corrections (implies --array)")
    return p


def _emit(args, outcomes: list[_Outcome], out, err) -> None:
    for o in outcomes:
        if o.err:
            err.write(o.err)
    if args.format == "json":
        docs = [o.doc for o in outcomes if o.doc is not None]
        if docs:
            body = docs[0] if len(outcomes) == 1 else {"v": 1, "results": docs}
            out.write(json.dumps(body, indent=2) + "\n")
    else:
        for o in outcomes:
            out.write(o.out)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.budget is None:
        args.budget = _default_budget()
    if args.budget <= 0:
        err.write("heapsmt: error: --budget must be positive\n")
        return EXIT_USAGE

    work = {"check": _check_one, "transpile": _transpile_one,
            "solve": _solve_one, "eval": _eval_one}
    try:
        if args.command in work:
            outcomes = _per_file(args, work[args.command])
        else:
            single = {"gen": _gen, "axioms": _axioms}[args.command]
            outcomes = [_guard(single, args)]
    except _UsageError as e:
        err.write(f"heapsmt: error: {e}\n")
        return EXIT_USAGE
    _emit(args, outcomes, out, err)
    return _combine(outcomes)


if __name__ == "__main__":
    sys.exit(main())
