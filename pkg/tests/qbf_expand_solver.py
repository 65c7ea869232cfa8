"""Tiny QDIMACS solver used as the external QBF command in tests.

Handles prefixes of the form exists X . forall U . exists Y (any block may be
missing) by expanding U: one copy of the matrix per assignment of U, each
with private copies of Y.  Exponential in |U|, so only for small inputs.

    python3 qbf_expand_solver.py [--no-model] FILE|-
"""
from __future__ import annotations

import argparse
import itertools
import sys

from fsmmint.sat.cnf import parse_dimacs
from fsmmint.sat.solver import Solver

MAX_UNIVERSALS = 16


def solve_qdimacs(text: str):
    """Return ``(truth, model of the outer block or None)``."""
    num_vars, clauses, blocks = parse_dimacs(text)
    quantified = {v for _q, vs in blocks for v in vs}
    # free variables count as outermost existentials
    outer = sorted(set(range(1, num_vars + 1)) - quantified)
    universal: list[int] = []
    inner: list[int] = []
    for q, vs in blocks:
        if q == "e" and not universal:
            outer += vs
        elif q == "a":
            if inner:
                raise ValueError("only exists-forall-exists prefixes are supported")
            universal += vs
        else:
            inner += vs
    if len(universal) > MAX_UNIVERSALS:
        raise ValueError(f"{len(universal)} universal variables is too many to expand")
    outer_set, uni_set = set(outer), set(universal)
    solver = Solver()
    solver.ensure_vars(num_vars)
    top = num_vars
    for bits in itertools.product((False, True), repeat=len(universal)):
        u = dict(zip(universal, bits))
        rename: dict[int, int] = {}
        for c in clauses:
            out = []
            sat = False
            for lit in c:
                v = abs(lit)
                if v in uni_set:
                    if u[v] == (lit > 0):
                        sat = True
                        break
                    continue
                if v in outer_set:
                    out.append(lit)
                    continue
                w = rename.get(v)
                if w is None:
                    top += 1
                    w = rename[v] = top
                    solver.ensure_vars(top)
                out.append(w if lit > 0 else -w)
            if sat:
                continue
            if not out:
                return False, None
            solver.add_clause(out)
    res = solver.solve()
    if not res:
        return False, None
    model = solver.model()
    return True, {v: model[v] for v in outer}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("path")
    parser.add_argument("--no-model", action="store_true", help="report the answer only")
    args = parser.parse_args(argv)
    text = sys.stdin.read() if args.path == "-" else open(args.path).read()
    truth, model = solve_qdimacs(text)
    num_vars = parse_dimacs(text)[0]
    print(f"s cnf {int(truth)} {num_vars} 0")
    if truth and model is not None and not args.no_model:
        for v, val in sorted(model.items()):
            print(f"V {v if val else -v} 0")
    return 10 if truth else 20


if __name__ == "__main__":
    sys.exit(main())
