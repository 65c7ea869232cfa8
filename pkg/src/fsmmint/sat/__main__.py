"""DIMACS front end for the embedded solver: ``python3 -m fsmmint.sat FILE|-``.

Prints ``s SATISFIABLE`` with a ``v`` model line or ``s UNSATISFIABLE`` and
exits with the customary 10/20 codes.
"""
import argparse
import sys

from .cnf import parse_dimacs
from .solver import Solver


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="python3 -m fsmmint.sat")
    parser.add_argument("path", help="DIMACS file, or - for stdin")
    args = parser.parse_args(argv)
    text = sys.stdin.read() if args.path == "-" else open(args.path).read()
    num_vars, clauses, _blocks = parse_dimacs(text)
    solver = Solver()
    solver.ensure_vars(num_vars)
    for c in clauses:
        solver.add_clause(c)
    if not solver.solve():
        print("s UNSATISFIABLE")
        return 20
    model = solver.model()
    print("s SATISFIABLE")
    print("v " + " ".join(str(v if model[v] else -v) for v in range(1, num_vars + 1)) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
