import random
import sys

import pytest
from hypothesis import given, settings, strategies as st

from fsmmint import ltl
from fsmmint.core import Alphabet, Fsm, accepts, element
from fsmmint.encode import Completeness, bfs_numbered
from fsmmint.harness.oracle import NoSolutionUpTo, brute_force_min_states
from fsmmint.synth import (Limits, Method, NoQbfSolver, Outcome, SynthesisRequest, find_frontier,
                           find_minimum, identify, verify)
from fsmmint.core import build_scenario_tree
from fsmmint.verifier import holds

from conftest import AB, SAMPLE_SCENARIOS, SAMPLE_FSM, QBF_SOLVER, QBF_SOLVER_NO_MODEL, RESPONSE_TEXT
from strategies import live_fsms
from test_encode import walk_scenarios

A1 = Alphabet(("e1", "e2"), ("z1",))
SAT_CMD = f"{sys.executable} -m fsmmint.sat -"
ALL = [(Method.ITERATIVE, {}), (Method.EXPONENTIAL, {}), (Method.BACKTRACKING, {}),
       (Method.QSAT, {"qbf_solver": QBF_SOLVER})]


def request(n, method=Method.ITERATIVE, formulas=(), scenarios=SAMPLE_SCENARIOS, **kw):
    return SynthesisRequest(AB, scenarios, formulas, n, method=method, **kw)


class TestSampleScenarios:
    @pytest.mark.parametrize("method,opts", ALL, ids=lambda x: getattr(x, "value", ""))
    def test_two_states_with_response_formula(self, method, opts):
        f = ltl.parse_ltl(RESPONSE_TEXT)
        res = identify(request(2, method, [f], **opts))
        assert res.found
        assert all(accepts(res.fsm, sc) for sc in SAMPLE_SCENARIOS)
        assert holds(res.fsm, f)
        assert verify(res.fsm, SAMPLE_SCENARIOS, [f]) == []

    @pytest.mark.parametrize("method,opts", ALL, ids=lambda x: getattr(x, "value", ""))
    def test_one_state_is_unsat(self, method, opts):
        res = identify(request(1, method, [ltl.parse_ltl(RESPONSE_TEXT)], **opts))
        assert res.outcome is Outcome.UNSATISFIABLE

    def test_iterative_counts_counterexamples(self):
        # the scenarios alone admit machines that loop on z2
        f = ltl.parse_ltl("G(wasAction(z2) -> X wasEvent(e1))")
        res = identify(request(3, formulas=[f]))
        if res.found:
            assert holds(res.fsm, f)
        assert res.stats.iterations >= 1

    def test_qsat_without_model_falls_back(self):
        res = identify(request(2, Method.QSAT, [ltl.parse_ltl(RESPONSE_TEXT)],
                               qbf_solver=QBF_SOLVER_NO_MODEL))
        assert res.found and holds(res.fsm, ltl.parse_ltl(RESPONSE_TEXT))

    def test_qsat_needs_a_solver(self, monkeypatch):
        monkeypatch.delenv("FSMMINT_QBF_SOLVER", raising=False)
        with pytest.raises(NoQbfSolver):
            identify(request(2, Method.QSAT, [ltl.parse_ltl(RESPONSE_TEXT)]))

    def test_external_sat_solver(self):
        res = identify(request(2, formulas=[ltl.parse_ltl(RESPONSE_TEXT)], sat_solver=SAT_CMD))
        assert res.found and verify(res.fsm, SAMPLE_SCENARIOS, [ltl.parse_ltl(RESPONSE_TEXT)]) == []


class TestLimits:
    def test_timeout(self):
        # false always yields a counterexample, so the loop reaches its deadline check
        res = identify(request(2, formulas=[ltl.FALSE], limits=Limits(timeout=0.0)))
        assert res.outcome is Outcome.TIMEOUT

    def test_budget(self):
        res = identify(request(2, Method.EXPONENTIAL, [ltl.parse_ltl(RESPONSE_TEXT)],
                               limits=Limits(expansion_budget=1)))
        assert res.outcome is Outcome.BUDGET_EXCEEDED

    def test_false_formula(self):
        for method, opts in ALL[:3]:
            assert identify(request(2, method, [ltl.FALSE], **opts)).outcome is Outcome.UNSATISFIABLE

    def test_rejects_bad_size(self):
        with pytest.raises(ValueError):
            request(0)


class TestMinimum:
    def test_samples(self):
        m = find_minimum(AB, SAMPLE_SCENARIOS, [ltl.parse_ltl(RESPONSE_TEXT)])
        assert m.state_count == 2
        assert m.lower_bound <= 2
        assert [s for s, *_ in m.per_size][-1] == 2

    def test_cap(self):
        m = find_minimum(AB, SAMPLE_SCENARIOS, [ltl.FALSE], max_states=3)
        assert m.state_count is None and not m.result.found

    @settings(max_examples=15, deadline=None)
    @given(live_fsms(A1, max_states=3), st.integers(0, 10**6), st.sampled_from(list(Completeness)))
    def test_iterative_matches_brute_force(self, ref, seed, mode):
        if mode is Completeness.COMPLETE and not ref.is_complete(A1):
            mode = Completeness.AT_LEAST_ONE
        rng = random.Random(seed)
        scenarios = walk_scenarios(ref, rng, count=2, length=4)
        f = ltl.parse_ltl(rng.choice(["G(wasAction(z1) -> X wasEvent(e2))", "F wasAction(z1)",
                                      "G F wasEvent(e1)", "true"]))
        want = brute_force_min_states(A1, scenarios, [f], mode, max_states=3)
        got = find_minimum(A1, scenarios, [f], mode=mode, max_states=3)
        if isinstance(want, NoSolutionUpTo):
            assert got.state_count is None
        else:
            assert got.state_count == want
            assert verify(got.result.fsm, scenarios, [f], mode, A1) == []
            assert bfs_numbered(got.result.fsm, A1)


class TestModes:
    def test_complete_mode_needs_every_event(self):
        a = Alphabet(("e1", "e2"), ("z1",))
        scenarios = [[element("e1", "z1"), element("e1", "z1")]]
        for method in (Method.ITERATIVE, Method.BACKTRACKING):
            res = identify(SynthesisRequest(a, scenarios, (), 1, Completeness.COMPLETE, method))
            assert res.found and res.fsm.is_complete(a)
            res = identify(SynthesisRequest(a, scenarios, (), 1, Completeness.AT_LEAST_ONE, method))
            assert res.found and not res.fsm.dead_states()


class TestBacktracking:
    def test_frontier(self):
        tree = build_scenario_tree(SAMPLE_SCENARIOS)
        assert find_frontier(tree, SAMPLE_FSM) == []
        assert find_frontier(tree, Fsm(2, {})) == [(1, "e1"), (1, "e2")]
        assert find_frontier(tree, Fsm(2, {(1, "e1"): (1, {"z2"})})) is None

    def test_nodes_counted(self):
        res = identify(request(2, Method.BACKTRACKING, [ltl.parse_ltl(RESPONSE_TEXT)]))
        assert res.found and res.stats.nodes > 0


class TestVerify:
    def test_reports_problems(self):
        bad = [[element("e1", "z2")]]
        problems = verify(SAMPLE_FSM, bad, [ltl.parse_ltl("G wasEvent(e1)")], Completeness.COMPLETE, AB)
        assert len(problems) == 3
        assert problems[0] == "scenario 1 fails at element 1"
        assert problems[2] == "FSM is not complete"
