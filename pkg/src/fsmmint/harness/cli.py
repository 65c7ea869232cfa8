"""Command-line interface.

Exit codes: 0 found (or check passed), 1 unsatisfiable (or check failed),
2 usage or input error, 3 resource limit reached.
"""
from __future__ import annotations

import argparse
import csv
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .. import ltl
from ..core import Alphabet, build_scenario_tree
from ..encode import Completeness, EncodingContext, base_clauses
from ..bmc import DEFAULT_BUDGET, assemble_qbf, negated_spec
from ..sat.cnf import to_dimacs
from ..synth import (Limits, Method, NoQbfSolver, Outcome, SynthesisRequest, find_minimum, identify,
                     verify)
from .generate import GenerationStuck, InstanceSpec, make_hard_instance, generate_instance
from .io import (FormatError, fsm_from_json, fsm_to_dot, fsm_to_json, natural_key, read_scenarios, symbols,
                 write_instance)

EXIT_FOUND, EXIT_UNSAT, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _size_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            sizes = list(range(int(lo), int(hi) + 1))
        else:
            sizes = [int(t) for t in text.split(",")]
    except ValueError:
        sizes = []
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    return sizes


def _methods(text: str) -> list[Method]:
    try:
        return [Method(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsmmint",
                                     description="Minimal FSM identification from scenarios and LTL.")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--complete", action="store_true", help="require every (state, event) transition")
        p.add_argument("--method", type=Method, choices=list(Method), default=Method.ITERATIVE,
                       metavar="{iterative,exponential,qsat,backtracking}")
        p.add_argument("--qbf-solver", default=os.environ.get("FSMMINT_QBF_SOLVER"),
                       help="QDIMACS solver command (default: $FSMMINT_QBF_SOLVER)")
        p.add_argument("--sat-solver", default=None, help="external DIMACS solver command")
        p.add_argument("--timeout", type=float, default=None, help="seconds")
        p.add_argument("--expansion-budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("identify", help="build an FSM from scenarios and formulas")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--ltl", default=None)
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--states", type=int)
    size.add_argument("--min-states", action="store_true")
    p.add_argument("--max-states", type=int, default=20)
    p.add_argument("--events", default=None, help="comma-separated event order")
    p.add_argument("--actions", default=None, help="comma-separated action order")
    solver_flags(p)
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry with generate; unused")
    p.add_argument("--out", default=".")
    p.add_argument("--dot", action="store_true", help="write fsm.dot")
    p.add_argument("--json", action="store_true", help="write fsm.json")
    p.add_argument("--dump-cnf", action="store_true", help="write the scenario CNF of the final size")
    p.add_argument("--dump-qbf", type=int, default=None, metavar="K",
                   help="write the QBF at bound K for the final size")

    p = sub.add_parser("generate", help="write a random instance directory")
    p.add_argument("--preset", choices=["standard", "custom"], default="standard")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--events", type=int, default=4)
    p.add_argument("--actions", type=int, default=4)
    p.add_argument("--scenario-count", type=int, default=10)
    p.add_argument("--total-length", type=int, default=None)
    p.add_argument("--formulas", type=int, default=4)
    p.add_argument("--complete", action="store_true")
    p.add_argument("--plain", action="store_true", help="skip the hard-instance filter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="solve generated instances and print a CSV summary")
    p.add_argument("--sizes", type=_size_range, default=_size_range("3..5"))
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--methods", type=_methods, default=[Method.ITERATIVE])
    p.add_argument("--events", type=int, default=4)
    p.add_argument("--actions", type=int, default=4)
    p.add_argument("--complete", action="store_true")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--expansion-budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--qbf-solver", default=os.environ.get("FSMMINT_QBF_SOLVER"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("verify", help="check an FSM against scenarios and formulas")
    p.add_argument("--fsm", required=True, help="FSM in JSON form")
    p.add_argument("--scenarios", default=None)
    p.add_argument("--ltl", default=None)
    p.add_argument("--complete", action="store_true")
    return parser


def _mode(args) -> Completeness:
    return Completeness.COMPLETE if args.complete else Completeness.AT_LEAST_ONE


def _read_inputs(args):
    try:
        scenarios = read_scenarios(args.scenarios) if args.scenarios else []
        formulas = ltl.read_ltl_file(args.ltl) if args.ltl else []
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except (FormatError, ltl.ParseError) as exc:
        raise UsageError(f"input error: {exc}") from exc
    return scenarios, formulas


def _alphabet(args, scenarios, formulas) -> Alphabet:
    events, actions = symbols(scenarios, formulas)
    if getattr(args, "events", None):
        order = args.events.split(",")
        unknown = events - set(order)
        if unknown:
            raise UsageError(f"events missing from --events: {sorted(unknown)}")
        events = order
    else:
        events = sorted(events, key=natural_key)
    if getattr(args, "actions", None):
        order = args.actions.split(",")
        unknown = actions - set(order)
        if unknown:
            raise UsageError(f"actions missing from --actions: {sorted(unknown)}")
        actions = order
    else:
        actions = sorted(actions, key=natural_key)
    try:
        return Alphabet(tuple(events), tuple(actions))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_identify(args) -> int:
    scenarios, formulas = _read_inputs(args)
    alphabet = _alphabet(args, scenarios, formulas)
    mode = _mode(args)
    limits = Limits(args.timeout, args.expansion_budget)
    options = dict(qbf_solver=args.qbf_solver, sat_solver=args.sat_solver)
    if args.method is Method.QSAT and not args.qbf_solver:
        raise UsageError("--method qsat needs --qbf-solver or FSMMINT_QBF_SOLVER")
    if args.min_states:
        minimum = find_minimum(alphabet, scenarios, formulas, args.method, mode, limits,
                               args.max_states, **options)
        for n, outcome, secs, iters in minimum.per_size:
            print(f"|S|={n}: {outcome.value} ({secs:.2f}s, {iters} iterations)")
        result, size = minimum.result, minimum.state_count
    else:
        if args.states < 1:
            raise UsageError("--states must be positive")
        req = SynthesisRequest(alphabet, scenarios, formulas, args.states, mode, args.method, limits,
                               **options)
        result, size = identify(req), args.states
    stats = result.stats
    print(f"outcome: {result.outcome.value}")
    print(f"iterations: {stats.iterations}, counterexamples: {stats.counterexamples}, "
          f"final k: {stats.final_k}, seconds: {stats.seconds:.2f}")
    out = Path(args.out)
    dump_size = size if size is not None else (args.states or None)
    if dump_size and (args.dump_cnf or args.dump_qbf is not None):
        out.mkdir(parents=True, exist_ok=True)
        ctx = EncodingContext(alphabet, dump_size, build_scenario_tree(scenarios), mode)
        if args.dump_cnf:
            clauses = base_clauses(ctx)
            (out / "problem.cnf").write_text(to_dimacs(clauses, ctx.pool.top))
            (out / "problem.vars").write_text("".join(f"{vid} {ctx.pool.label(vid)}\n"
                                                      for _name, vid in ctx.pool.items()))
        if args.dump_qbf is not None:
            qbf = assemble_qbf(ctx, negated_spec(formulas), args.dump_qbf)
            (out / "problem.qdimacs").write_text(qbf.to_qdimacs())
            (out / "problem.qbf.txt").write_text(qbf.describe())
    if result.outcome is Outcome.FOUND:
        print(f"states: {size}")
        out.mkdir(parents=True, exist_ok=True)
        both = not (args.dot or args.json)
        if args.dot or both:
            (out / "fsm.dot").write_text(fsm_to_dot(result.fsm, alphabet))
        if args.json or both:
            (out / "fsm.json").write_text(fsm_to_json(result.fsm, alphabet))
        return EXIT_FOUND
    if result.outcome is Outcome.UNSATISFIABLE:
        return EXIT_UNSAT
    return EXIT_LIMIT


def cmd_generate(args) -> int:
    if args.preset == "standard":
        spec = InstanceSpec.standard(args.states, args.seed, args.complete)
    else:
        spec = InstanceSpec(args.states, args.events, args.actions, args.complete, args.scenario_count,
                            args.total_length, args.formulas, args.seed)
    try:
        inst = generate_instance(spec) if args.plain else make_hard_instance(spec)
    except GenerationStuck as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    path = write_instance(inst, args.out)
    print(f"instance written to {path}")
    return EXIT_FOUND


def bench_task(task: tuple) -> tuple:
    """Generate one hard instance and solve it at its reference size."""
    size, seed, method, events, actions, complete, timeout, budget, qbf = task
    spec = InstanceSpec(size, events, actions, complete, seed=seed)
    try:
        inst = make_hard_instance(spec)
    except GenerationStuck:
        return (False, None, None, None)
    req = SynthesisRequest(spec.alphabet, inst.scenarios, inst.formulas, size, spec.mode, method,
                           Limits(timeout, budget), qbf_solver=qbf)
    try:
        res = identify(req)
    except NoQbfSolver:
        return (False, None, None, None)
    return (res.found, res.stats.seconds, res.stats.iterations, res.stats.final_k)


def cmd_bench(args) -> int:
    tasks = [(size, args.seed * 100_003 + size * 1000 + run, method, args.events, args.actions,
              args.complete, args.timeout, args.expansion_budget, args.qbf_solver)
             for size in args.sizes for method in args.methods for run in range(args.runs)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(bench_task, tasks))
    else:
        results = [bench_task(t) for t in tasks]
    rows = []
    for size in args.sizes:
        for method in args.methods:
            mine = [r for t, r in zip(tasks, results) if t[0] == size and t[2] is method]
            solved = [r for r in mine if r[0]]
            ks = [r[3] for r in solved if r[3] is not None]
            rows.append({
                "size": size, "method": method.value, "solved": len(solved),
                "medianSeconds": f"{statistics.median(r[1] for r in solved):.3f}" if solved else "",
                "meanIterations": f"{statistics.mean(r[2] for r in solved):.2f}" if solved else "",
                "meanFinalK": f"{statistics.mean(ks):.2f}" if ks else "",
            })
    fields = ["size", "method", "solved", "medianSeconds", "meanIterations", "meanFinalK"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_FOUND


def cmd_verify(args) -> int:
    try:
        fsm = fsm_from_json(Path(args.fsm).read_text())
    except (OSError, FormatError) as exc:
        raise UsageError(str(exc)) from exc
    scenarios, formulas = _read_inputs(args)
    alphabet = None
    if args.complete:
        events, actions = symbols(scenarios, formulas)
        events |= {e for (_s, e) in fsm.transitions}
        alphabet = Alphabet(tuple(sorted(events, key=natural_key)), tuple(sorted(actions, key=natural_key)))
    problems = verify(fsm, scenarios, formulas, _mode(args), alphabet)
    for p in problems:
        print(p)
    print("ok" if not problems else f"{len(problems)} problem(s)")
    return EXIT_FOUND if not problems else EXIT_UNSAT


COMMANDS = {"identify": cmd_identify, "generate": cmd_generate, "bench": cmd_bench,
            "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, NoQbfSolver) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
