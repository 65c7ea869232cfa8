"""Shared hypothesis strategies and brute-force helpers."""
import random

from hypothesis import strategies as st

from fsmmint import ltl
from fsmmint.core import Fsm, atom_label


def atoms(alphabet):
    return st.one_of(st.sampled_from([ltl.WasEvent(e) for e in alphabet.events]),
                     st.sampled_from([ltl.WasAction(a) for a in alphabet.actions]))


def formulas(alphabet, max_leaves=6):
    unary = [ltl.Not, ltl.Next, ltl.Globally, ltl.Finally]
    binary = [ltl.And, ltl.Or, ltl.Implies, ltl.Until, ltl.Release]
    return st.recursive(
        st.one_of(atoms(alphabet), st.sampled_from([ltl.TRUE, ltl.FALSE])),
        lambda inner: st.one_of(
            st.builds(lambda op, a: op(a), st.sampled_from(unary), inner),
            st.builds(lambda op, a, b: op(a, b), st.sampled_from(binary), inner, inner)),
        max_leaves=max_leaves)


@st.composite
def live_fsms(draw, alphabet, max_states=3):
    """FSMs where every state has an outgoing transition."""
    n = draw(st.integers(1, max_states))
    trans = {}
    for s in range(1, n + 1):
        present = draw(st.lists(st.booleans(), min_size=len(alphabet.events),
                                max_size=len(alphabet.events)))
        if not any(present):
            present[draw(st.integers(0, len(present) - 1))] = True
        for e, keep in zip(alphabet.events, present):
            if keep:
                trans[(s, e)] = (draw(st.integers(1, n)),
                                 draw(st.frozensets(st.sampled_from(alphabet.actions))))
    return Fsm(n, trans)


def random_formula(rng: random.Random, alphabet, depth=3):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return ltl.WasEvent(rng.choice(alphabet.events))
        return ltl.WasAction(rng.choice(alphabet.actions))
    kind = rng.randrange(9)
    if kind < 4:
        op = [ltl.Not, ltl.Next, ltl.Globally, ltl.Finally][kind]
        return op(random_formula(rng, alphabet, depth - 1))
    op = [ltl.And, ltl.Or, ltl.Implies, ltl.Until, ltl.Release][kind - 4]
    return op(random_formula(rng, alphabet, depth - 1), random_formula(rng, alphabet, depth - 1))


def random_live_fsm(rng: random.Random, alphabet, max_states=3):
    n = rng.randint(1, max_states)
    trans = {}
    for s in range(1, n + 1):
        events = [e for e in alphabet.events if rng.random() < 0.6] or [rng.choice(alphabet.events)]
        for e in events:
            outs = frozenset(a for a in alphabet.actions if rng.random() < 0.5)
            trans[(s, e)] = (rng.randint(1, n), outs)
    return Fsm(n, trans)


def lassos(fsm: Fsm, max_len: int):
    """All lassos over transitions of ``fsm`` with at most ``max_len`` transitions, as label words."""
    quads = [(s, e, out, d) for (s, e), (d, out) in fsm.transitions.items()]
    stack = [[q] for q in quads if q[0] == fsm.initial]
    while stack:
        path = stack.pop()
        last = path[-1][3]
        for start, q in enumerate(path):
            if q[0] == last:
                labels = [atom_label(p[1], p[2]) for p in path]
                yield labels[:start], labels[start:]
        if len(path) < max_len:
            stack.extend(path + [q] for q in quads if q[0] == last)


def labels_of(elements):
    return [atom_label(e, out) for e, out in elements]
