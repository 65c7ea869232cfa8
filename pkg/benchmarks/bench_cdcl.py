"""Compiled vs pure-Python CDCL on pigeonhole, random 3-SAT and an identification CNF.

    python3 benchmarks/bench_cdcl.py [--repeat N]
"""
from __future__ import annotations

import argparse
import random
import statistics
import time

from fsmmint.core import build_scenario_tree
from fsmmint.encode import EncodingContext, base_clauses
from fsmmint.harness.generate import InstanceSpec, generate_instance
from fsmmint.sat.solver import PythonSolver

try:
    from fsmmint.sat.solver import CompiledSolver
except ImportError:
    CompiledSolver = None


def pigeonhole(pigeons: int, holes: int):
    v = lambda i, j: i * holes + j + 1
    clauses = [[v(i, j) for j in range(holes)] for i in range(pigeons)]
    for j in range(holes):
        for a in range(pigeons):
            for b in range(a + 1, pigeons):
                clauses.append([-v(a, j), -v(b, j)])
    return clauses


def random_3sat(n: int, ratio: float, seed: int):
    rng = random.Random(seed)
    return [[rng.choice((-1, 1)) * rng.randint(1, n) for _ in range(3)] for _ in range(int(n * ratio))]


def identification_cnf(states: int, seed: int):
    inst = generate_instance(InstanceSpec(states, 4, 4, formula_count=0, seed=seed))
    ctx = EncodingContext(inst.alphabet, states, build_scenario_tree(inst.scenarios))
    return base_clauses(ctx)


def run(factory, clauses) -> tuple[float, bool | None]:
    start = time.perf_counter()
    s = factory()
    for c in clauses:
        s.add_clause(c)
    res = s.solve()
    return time.perf_counter() - start, res


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    problems = [
        ("php 7->6", pigeonhole(7, 6)),
        ("php 8->7", pigeonhole(8, 7)),
        ("3sat n=80", random_3sat(80, 4.26, 1)),
        ("3sat n=120", random_3sat(120, 4.26, 2)),
        ("identify |S|=6", identification_cnf(6, 3)),
    ]
    backends = [("python", PythonSolver)]
    if CompiledSolver is not None:
        backends.insert(0, ("compiled", CompiledSolver))
    print(f"{'problem':<16} {'backend':<9} {'result':<7} {'median s':>9}")
    for name, clauses in problems:
        times = {}
        for label, factory in backends:
            samples = [run(factory, clauses) for _ in range(args.repeat)]
            times[label] = statistics.median(t for t, _ in samples)
            print(f"{name:<16} {label:<9} {str(samples[0][1]):<7} {times[label]:>9.4f}")
        if len(times) == 2:
            print(f"{'':<16} speedup {times['python'] / times['compiled']:.1f}x")


if __name__ == "__main__":
    main()
