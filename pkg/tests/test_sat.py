import itertools
import sys
import time

import pytest
from hypothesis import given, settings, strategies as st

from fsmmint.sat import (And, Iff, Implies, Lit, Not, Or, FALSE, TRUE, CnfProblem, SolverCrashed,
                         UnquantifiedVariable, VarPool, evaluate, external_solve, parse_dimacs,
                         shape, substitute, to_dimacs, to_qdimacs, tseitin)
from fsmmint.sat.external import parse_output
from fsmmint.sat.solver import BACKEND, CompiledSolver, PythonSolver

BACKENDS = [PythonSolver] + ([CompiledSolver] if CompiledSolver is not None else [])
EMBEDDED_CMD = f"{sys.executable} -m fsmmint.sat -"


def brute_sat(n, clauses):
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def pigeonhole(pigeons, holes):
    v = lambda i, j: i * holes + j + 1
    clauses = [[v(i, j) for j in range(holes)] for i in range(pigeons)]
    for j in range(holes):
        for a, b in itertools.combinations(range(pigeons), 2):
            clauses.append([-v(a, j), -v(b, j)])
    return clauses


@st.composite
def cnfs(draw, max_vars=8):
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=3), max_size=5 * n))
    return n, clauses


@pytest.fixture(scope="module", params=BACKENDS, ids=lambda cls: cls.backend)
def solver_cls(request):
    return request.param


class TestSolver:
    def test_backend_is_compiled_when_built(self):
        assert BACKEND in ("compiled", "python")
        if CompiledSolver is not None:
            assert BACKEND == "compiled"

    def test_pure_python_fallback_selected_at_import(self):
        import os
        import subprocess
        env = dict(os.environ, FSMMINT_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "from fsmmint.sat.solver import BACKEND; print(BACKEND)"],
                             env=env, capture_output=True, text=True, check=True).stdout
        assert out.strip() == "python"

    @settings(max_examples=150, deadline=None)
    @given(cnfs())
    def test_agrees_with_brute_force(self, solver_cls, problem):
        n, clauses = problem
        s = solver_cls()
        s.ensure_vars(n)
        for c in clauses:
            s.add_clause(c)
        res = s.solve()
        assert res == brute_sat(n, clauses)
        if res:
            model = s.model()
            assert all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)

    @settings(max_examples=80, deadline=None)
    @given(cnfs(), st.integers(0, 100))
    def test_incremental(self, solver_cls, problem, cut):
        n, clauses = problem
        cut = cut * len(clauses) // 100
        s = solver_cls()
        s.ensure_vars(n)
        for c in clauses[:cut]:
            s.add_clause(c)
        assert s.solve() == brute_sat(n, clauses[:cut])
        for c in clauses[cut:]:
            s.add_clause(c)
        assert s.solve() == brute_sat(n, clauses)

    def test_pigeonhole_unsat(self, solver_cls):
        s = solver_cls()
        for c in pigeonhole(5, 4):
            s.add_clause(c)
        start = time.monotonic()
        assert s.solve() is False
        assert time.monotonic() - start < 5

    def test_empty_clause_and_tautology(self, solver_cls):
        s = solver_cls()
        s.ensure_vars(2)
        s.add_clause([1, -1])
        assert s.solve() is True
        s.add_clause([])
        assert s.solve() is False

    def test_deadline(self, solver_cls):
        s = solver_cls()
        for c in pigeonhole(10, 9):
            s.add_clause(c)
        assert s.solve(deadline=time.monotonic() + 0.05) is None

    def test_new_var(self, solver_cls):
        s = solver_cls()
        a, b = s.new_var(), s.new_var()
        assert (a, b) == (1, 2)
        s.add_clause([a])
        s.add_clause([-a, -b])
        assert s.solve() and s.model()[a] and not s.model()[b]


class TestCnfProblem:
    def test_pool_names(self):
        pool = VarPool()
        x = pool("x", 1, 2)
        assert pool("x", 1, 2) == x
        assert pool.name(x) == ("x", 1, 2)
        assert pool.label(-x) == "-x_1_2"
        aux = pool.aux()
        assert pool.kind(aux) == "aux" and pool.top == 2

    def test_incremental_solve_and_value(self):
        pool = VarPool()
        a, b = pool("a"), pool("b")
        p = CnfProblem(pool)
        p.add_clauses([(a, b)])
        assert p.solve()
        p.add_clause((-a,))
        assert p.solve() and p.value(b) and p.value(-a)
        p.add_clause((-b,))
        assert p.solve() is False

    def test_dump_uses_names(self):
        pool = VarPool()
        p = CnfProblem(pool).add_clauses([(pool("y", 1, 2, "e1"), -pool("z", 1, "z1", "e1"))])
        assert p.dump() == "y_1_2_e1 -z_1_z1_e1\n"


class TestFormats:
    @given(cnfs())
    def test_dimacs_round_trip(self, problem):
        n, clauses = problem
        nv, parsed, blocks = parse_dimacs(to_dimacs(clauses, n))
        assert nv == n and blocks == []
        assert parsed == [tuple(c) for c in clauses]

    def test_qdimacs(self):
        text = to_qdimacs([(1, -2), (2, 3)], [("e", [1]), ("a", [2]), ("e", [3])])
        assert text.splitlines()[:4] == ["p cnf 3 2", "e 1 0", "a 2 0", "e 3 0"]
        assert parse_dimacs(text)[2] == [("e", [1]), ("a", [2]), ("e", [3])]

    def test_qdimacs_rejects_free_variables(self):
        with pytest.raises(UnquantifiedVariable):
            to_qdimacs([(1, 2)], [("e", [1])])


class TestCircuits:
    def test_shape_ignores_argument_order(self):
        assert shape(And(Lit(1), Lit(-2))) == shape(And(Lit(-2), Lit(1)))
        assert shape(Or(Lit(1), And(Lit(2), Lit(3)))) != shape(And(Lit(1), Or(Lit(2), Lit(3))))

    def test_substitute_folds(self):
        c = Or(And(Lit(1), Lit(2)), Not(Lit(3)))
        assert substitute(c, {3: True, 1: False}) is FALSE
        assert shape(substitute(c, {3: True, 1: True})) == 2
        assert substitute(Iff(Lit(1), Lit(2)), {1: True, 2: True}) is TRUE

    @settings(max_examples=150, deadline=None)
    @given(st.recursive(
        st.integers(1, 4).flatmap(lambda v: st.sampled_from([Lit(v), Lit(-v)])) | st.sampled_from([TRUE, FALSE]),
        lambda inner: st.one_of(
            st.builds(Not, inner),
            st.lists(inner, min_size=1, max_size=3).map(lambda a: And(*a)),
            st.lists(inner, min_size=1, max_size=3).map(lambda a: Or(*a)),
            st.builds(Implies, inner, inner),
            st.builds(Iff, inner, inner)),
        max_leaves=8))
    def test_tseitin_is_equivalent_on_inputs(self, c):
        counter = itertools.count(5)
        clauses, root = tseitin(c, lambda: next(counter))
        top = max([4] + [abs(l) for cl in clauses for l in cl] + [abs(root)])
        for bits in itertools.product((False, True), repeat=4):
            assignment = dict(zip(range(1, 5), bits))
            s = PythonSolver()
            s.ensure_vars(top)
            for v, val in assignment.items():
                s.add_clause([v if val else -v])
            for cl in clauses:
                s.add_clause(cl)
            s.add_clause([root])
            assert bool(s.solve()) == evaluate(c, assignment.__getitem__)


class TestExternal:
    def test_parse_sat_competition_output(self):
        res = parse_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 10)
        assert res.satisfiable and res.value(1) and not res.value(2) and res.value(3)

    def test_parse_qdimacs_output(self):
        res = parse_output("s cnf 1 4 7\nV -4 0\n", 10)
        assert res.satisfiable and res.model == {4: False}
        assert parse_output("s cnf 0 4 7\n", 20).satisfiable is False

    def test_exit_codes_only(self):
        assert parse_output("", 20).satisfiable is False
        with pytest.raises(SolverCrashed):
            parse_output("garbage", 1)

    def test_round_trip_through_embedded_cli(self):
        res = external_solve(EMBEDDED_CMD, to_dimacs([(1, 2), (-1,)], 2))
        assert res.satisfiable and res.value(2) and not res.value(1)
        assert external_solve(EMBEDDED_CMD, to_dimacs(pigeonhole(3, 2))).satisfiable is False

    def test_missing_command(self):
        with pytest.raises(SolverCrashed):
            external_solve("/nonexistent/solver", "p cnf 0 0\n")
