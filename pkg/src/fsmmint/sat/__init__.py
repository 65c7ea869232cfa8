"""CNF infrastructure: variable pool, clause store, circuits, solvers, file formats."""
from .circuit import (FALSE, TRUE, And, Circuit, Const, Iff, Implies, Lit, Not, Or,
                      Tseitin, evaluate, shape, substitute, tseitin)
from .cnf import (CnfProblem, UnquantifiedVariable, VarPool, parse_dimacs, to_dimacs,
                  to_qdimacs)
from .external import SolverCrashed, SolverResult, SolverTimeout, external_solve
from .solver import BACKEND, CompiledSolver, PythonSolver, Solver

__all__ = [
    "And", "BACKEND", "Circuit", "CnfProblem", "CompiledSolver", "Const", "FALSE", "Iff",
    "Implies", "Lit", "Not", "Or", "PythonSolver", "Solver", "SolverCrashed", "SolverResult",
    "SolverTimeout", "TRUE", "Tseitin", "UnquantifiedVariable", "VarPool", "evaluate",
    "external_solve", "parse_dimacs", "shape", "substitute", "to_dimacs", "to_qdimacs", "tseitin",
]
