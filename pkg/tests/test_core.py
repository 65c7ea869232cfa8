from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from fsmmint.core import (Alphabet, Counterexample, DeadState, DeterminismConflict, Fsm,
                          NegativeScenarioTree, UnknownSymbol, accepts, build_scenario_tree,
                          element, executes, first_mismatch, fsm_to_kripke, greedy_max_clique,
                          inconsistent_pairs)

from conftest import AB, SAMPLE_SCENARIOS, SAMPLE_COUNTEREXAMPLES, SAMPLE_FSM


def random_fsms(max_states=3, alphabet=AB, complete=False):
    n = st.integers(1, max_states)

    @st.composite
    def build(draw):
        size = draw(n)
        trans = {}
        for s in range(1, size + 1):
            for e in alphabet.events:
                if complete or draw(st.booleans()):
                    d = draw(st.integers(1, size))
                    out = draw(st.sets(st.sampled_from(alphabet.actions)))
                    trans[(s, e)] = (d, out)
        return Fsm(size, trans)

    return build()


def walk(fsm, events):
    state, out = fsm.initial, []
    for e in events:
        step = fsm.step(state, e)
        if step is None:
            break
        out.append((e, step[1]))
        state = step[0]
    return tuple(out)


class TestAlphabet:
    def test_numbered(self):
        ab = Alphabet.numbered(2, 3)
        assert ab.events == ("e1", "e2")
        assert ab.actions == ("z1", "z2", "z3")

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Alphabet(("e1", "e1"))
        with pytest.raises(ValueError):
            Alphabet(())

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbol):
            AB.check_element(element("e9", "z1"))
        with pytest.raises(UnknownSymbol):
            AB.check_element(element("e1", "z9"))

    def test_sort_actions_follows_alphabet(self):
        assert AB.sort_actions({"z2", "z1"}) == ("z1", "z2")


class TestFsm:
    def test_step_and_dead_states(self):
        fsm = Fsm(3, {(1, "e1"): (2, {"z1"})})
        assert fsm.step(1, "e1") == (2, frozenset({"z1"}))
        assert fsm.step(1, "e2") is None
        assert fsm.dead_states() == [2, 3]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            Fsm(1, {(1, "e1"): (2, set())})

    def test_reachable(self):
        fsm = Fsm(3, {(1, "e1"): (2, set()), (3, "e1"): (1, set())})
        assert fsm.reachable() == {1, 2}

    def test_canonical_renumbers_in_bfs_order(self):
        fsm = Fsm(3, {(1, "e2"): (2, set()), (1, "e1"): (3, set()), (2, "e1"): (1, set())})
        can = fsm.canonical(AB.events)
        assert can.step(1, "e1")[0] == 2 and can.step(1, "e2")[0] == 3
        assert can.step(3, "e1")[0] == 1

    def test_canonical_drops_unreachable(self):
        fsm = Fsm(3, {(1, "e1"): (1, set()), (3, "e1"): (2, set())})
        assert fsm.canonical(AB.events).state_count == 1

    @given(random_fsms(), st.lists(st.sampled_from(AB.events), max_size=8))
    def test_canonical_preserves_behaviour(self, fsm, events):
        assert walk(fsm, events) == walk(fsm.canonical(AB.events), events)


class TestKripke:
    def test_one_state_per_transition(self):
        k = fsm_to_kripke(SAMPLE_FSM)
        assert len(k) == 3
        assert len(k.initial) == 2
        assert all(len(succ) >= 1 for succ in k.successors)

    def test_labels(self):
        k = fsm_to_kripke(SAMPLE_FSM)
        labels = {lab for lab in k.labels}
        assert frozenset({("wasEvent", "e2"), ("wasAction", "z2")}) in labels

    def test_dead_state_rejected(self):
        with pytest.raises(DeadState):
            fsm_to_kripke(Fsm(2, {(1, "e1"): (2, set())}))
        assert len(fsm_to_kripke(Fsm(2, {(1, "e1"): (2, set())}), allow_dead=True)) == 1


class TestScenarios:
    def test_accepts_samples(self):
        assert all(accepts(SAMPLE_FSM, sc) for sc in SAMPLE_SCENARIOS)

    def test_first_mismatch_position(self):
        sc = [element("e1", "z1"), element("e2", "z2")]
        assert first_mismatch(SAMPLE_FSM, sc) == 2
        assert first_mismatch(SAMPLE_FSM, [element("e1")]) == 1

    def test_determinism_conflict(self):
        with pytest.raises(DeterminismConflict):
            build_scenario_tree([[element("e1", "z1")], [element("e1", "z2")]])

    def test_sample_tree_shape(self):
        tree = build_scenario_tree(SAMPLE_SCENARIOS)
        assert tree.size == 9
        def path(v):
            steps = []
            while tree.parent[v] is not None:
                p = tree.parent[v]
                e = next(e for e, (_o, c) in tree.children[p].items() if c == v)
                steps.append(e)
                v = p
            return "".join(reversed(steps))

        labels = {path(c): (e, "".join(sorted(out))) for _v, e, out, c in tree.edges()}
        z1 = "z1"
        assert labels == {
            "e1": ("e1", z1), "e1e1": ("e1", z1), "e1e1e1": ("e1", z1), "e1e1e2": ("e2", z1),
            "e1e2": ("e2", z1), "e2": ("e2", z1), "e2e2": ("e2", "z2"), "e2e2e1": ("e1", z1),
        }

    @given(st.lists(st.lists(st.tuples(st.sampled_from(AB.events), st.just(frozenset())),
                             max_size=5), max_size=5))
    def test_tree_size_bounded_by_total_length(self, scenarios):
        tree = build_scenario_tree(scenarios)
        assert tree.size <= 1 + sum(len(sc) for sc in scenarios)
        assert all(tree.parent[c] == v for v, _e, _o, c in tree.edges())


def brute_inconsistent(tree):
    """Pairs whose subtrees disagree on some common event path."""
    def behaviour(v):
        out = {}
        stack = [(v, ())]
        while stack:
            node, path = stack.pop()
            for e, (o, c) in tree.children[node].items():
                out[path + (e,)] = o
                stack.append((c, path + (e,)))
        return out

    beh = {v: behaviour(v) for v in tree.nodes()}
    return {(u, v) for u, v in combinations(tree.nodes(), 2)
            if any(beh[v].get(p, o) != o for p, o in beh[u].items())}


def brute_max_clique(pairs, n):
    best = 1
    for size in range(2, n + 1):
        if any(all((a, b) in pairs for a, b in combinations(c, 2))
               for c in combinations(range(1, n + 1), size)):
            best = size
        else:
            break
    return best


class TestConsistency:
    def test_sample_pairs_match_brute_force(self):
        tree = build_scenario_tree(SAMPLE_SCENARIOS)
        assert inconsistent_pairs(tree) == brute_inconsistent(tree)

    def test_sample_clique_is_valid_and_not_above_exact(self):
        tree = build_scenario_tree(SAMPLE_SCENARIOS)
        pairs = inconsistent_pairs(tree)
        clique = greedy_max_clique(pairs, tree.size)
        assert all(tuple(sorted(p)) in pairs for p in combinations(clique, 2))
        assert len(clique) <= brute_max_clique(pairs, tree.size)

    def test_clique_conventions(self):
        assert len(greedy_max_clique([], 4)) == 1
        assert len(greedy_max_clique([(1, 2), (1, 3), (2, 3)], 3)) == 3

    @settings(max_examples=60)
    @given(st.lists(st.lists(st.tuples(st.sampled_from(AB.events),
                                       st.frozensets(st.sampled_from(AB.actions))),
                             min_size=1, max_size=4), max_size=4))
    def test_pairs_match_brute_force(self, scenarios):
        try:
            tree = build_scenario_tree(scenarios)
        except DeterminismConflict:
            return
        assert inconsistent_pairs(tree) == brute_inconsistent(tree)


class TestNegativeTree:
    def test_sample_counterexample_tree(self):
        neg = NegativeScenarioTree()
        for cex in SAMPLE_COUNTEREXAMPLES:
            assert neg.add_counterexample(cex)
        assert len(neg.back_edges) == 2
        assert len(neg.terminal) == 1

    def test_duplicate_counterexample(self):
        neg = NegativeScenarioTree()
        assert neg.add_counterexample(SAMPLE_COUNTEREXAMPLES[0])
        assert not neg.add_counterexample(SAMPLE_COUNTEREXAMPLES[0])

    def test_paths_round_trip(self):
        neg = NegativeScenarioTree()
        for cex in SAMPLE_COUNTEREXAMPLES:
            neg.add_counterexample(cex)
        assert sorted(neg.paths(), key=repr) == sorted(SAMPLE_COUNTEREXAMPLES, key=repr)

    def test_executes(self):
        loop = Counterexample((element("e2", "z1"),), (element("e2", "z2"), element("e2", "z1")))
        assert executes(SAMPLE_FSM, loop)
        assert not executes(SAMPLE_FSM, SAMPLE_COUNTEREXAMPLES[0])
        assert executes(SAMPLE_FSM, Counterexample((element("e1", "z1"),)))

    def test_format(self):
        text = SAMPLE_COUNTEREXAMPLES[1].format(AB)
        assert text == "(e2, z1), (e2, z2), [(e1, z2)]"
