"""Boolean encodings of FSM identification and decoding of models.

Variables (all named in the context's :class:`VarPool`):

* ``x(v, i)``: scenario-tree node ``v`` is coloured with state ``i``
* ``y(i1, i2, e)``: transition from ``i1`` to ``i2`` on event ``e``
* ``z(i, a, e)``: action ``a`` is output on event ``e`` in state ``i``
* ``xbar(v, i)``: negative-tree node ``v`` is executed, ending in state ``i``
* ``t``, ``p``, ``m``: helpers of the BFS symmetry-breaking predicate
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .core import (Alphabet, Fsm, NegativeScenarioTree, ScenarioTree, greedy_max_clique,
                   inconsistent_pairs)
from .sat.cnf import VarPool


class MalformedModel(ValueError):
    pass


class Completeness(enum.Enum):
    COMPLETE = "complete"          # every (state, event) has a transition
    AT_LEAST_ONE = "at_least_one"  # every state has some outgoing transition


@dataclass
class EncodingContext:
    alphabet: Alphabet
    state_count: int
    tree: ScenarioTree
    mode: Completeness = Completeness.AT_LEAST_ONE
    negative: NegativeScenarioTree = field(default_factory=NegativeScenarioTree)
    pool: VarPool = field(default_factory=VarPool)
    symmetry: bool = True
    # how much of the negative tree is already encoded
    neg_nodes_done: int = 1
    neg_terminals_done: int = 0
    neg_back_edges_done: int = 0
    neg_root_done: bool = False

    def __post_init__(self):
        if self.state_count < 1:
            raise ValueError("state_count must be positive")
        self._pairs = None
        # fixed allocation order keeps variable ids reproducible
        for v in self.tree.nodes():
            for i in self.states:
                self.x(v, i)
        for i1 in self.states:
            for e in self.alphabet.events:
                for i2 in self.states:
                    self.y(i1, i2, e)
        for i in self.states:
            for e in self.alphabet.events:
                for a in self.alphabet.actions:
                    self.z(i, a, e)

    @property
    def states(self) -> range:
        return range(1, self.state_count + 1)

    def x(self, v, i):
        return self.pool("x", v, i)

    def y(self, i1, i2, e):
        return self.pool("y", i1, i2, e)

    def z(self, i, a, e):
        return self.pool("z", i, a, e)

    def xbar(self, v, i):
        return self.pool("xbar", v, i)

    @property
    def inconsistent(self) -> set:
        if self._pairs is None:
            self._pairs = inconsistent_pairs(self.tree)
        return self._pairs

    def fsm_vars(self) -> list[int]:
        """Ids of all x, y, z variables in allocation order."""
        return [vid for name, vid in self.pool.items() if name[0] in ("x", "y", "z")]


def _at_most_one(lits: list[int]) -> list[tuple]:
    return [(-a, -b) for a, b in combinations(lits, 2)]


def encode_scenarios(ctx: EncodingContext) -> list[tuple]:
    """Colouring of the scenario tree coherent with the transition variables."""
    clauses: list[tuple] = [(ctx.x(1, 1),)]
    for v in ctx.tree.nodes():
        lits = [ctx.x(v, i) for i in ctx.states]
        clauses.append(tuple(lits))
        clauses += _at_most_one(lits)
    for u, v in sorted(ctx.inconsistent):
        clauses += [(-ctx.x(u, i), -ctx.x(v, i)) for i in ctx.states]
    for i1 in ctx.states:
        for e in ctx.alphabet.events:
            clauses += _at_most_one([ctx.y(i1, i2, e) for i2 in ctx.states])
    for v, e, _out, child in ctx.tree.edges():
        for i1 in ctx.states:
            for i2 in ctx.states:
                y = ctx.y(i1, i2, e)
                clauses.append((-ctx.x(v, i1), -ctx.x(child, i2), y))
                clauses.append((-ctx.x(v, i1), -y, ctx.x(child, i2)))
    return clauses


def encode_actions(ctx: EncodingContext) -> list[tuple]:
    """Output variables agree with every scenario edge leaving a coloured node."""
    clauses = []
    for v, e, out, _child in ctx.tree.edges():
        for i in ctx.states:
            x = ctx.x(v, i)
            for a in ctx.alphabet.actions:
                z = ctx.z(i, a, e)
                clauses.append((-x, z) if a in out else (-x, -z))
    return clauses


def encode_completeness(ctx: EncodingContext) -> list[tuple]:
    events = ctx.alphabet.events
    if ctx.mode is Completeness.COMPLETE:
        return [tuple(ctx.y(i1, i2, e) for i2 in ctx.states) for i1 in ctx.states for e in events]
    return [tuple(ctx.y(i1, i2, e) for e in events for i2 in ctx.states) for i1 in ctx.states]


def encode_symmetry_bfs(ctx: EncodingContext) -> list[tuple]:
    """States must be numbered in BFS discovery order from state 1.

    ``t(i, j)``: some transition i -> j.  ``p(j, i)``: i is the smallest state
    with a transition into j.  ``m(i, j, e)``: e is the smallest event of a
    transition i -> j.  Children of one parent are ordered by that event.
    """
    n = ctx.state_count
    if n < 2:
        return []
    pool, events = ctx.pool, ctx.alphabet.events
    t = {(i, j): pool("t", i, j) for j in range(2, n + 1) for i in range(1, j)}
    p = {(j, i): pool("p", j, i) for j in range(2, n + 1) for i in range(1, j)}
    m = {(i, j, e): pool("m", i, j, e) for j in range(2, n + 1) for i in range(1, j) for e in events}
    clauses = []
    for (i, j), tv in t.items():
        ys = [ctx.y(i, j, e) for e in events]
        clauses.append((-tv,) + tuple(ys))
        clauses += [(tv, -y) for y in ys]
    for (j, i), pv in p.items():
        clauses.append((-pv, t[i, j]))
        clauses += [(-pv, -t[c, j]) for c in range(1, i)]
        clauses.append((pv, -t[i, j]) + tuple(t[c, j] for c in range(1, i)))
    for j in range(2, n + 1):
        clauses.append(tuple(p[j, i] for i in range(1, j)))
    for j in range(2, n):
        for i in range(1, j):
            for i2 in range(1, i):
                clauses.append((-p[j, i], -p[j + 1, i2]))
    for (i, j, e), mv in m.items():
        k = events.index(e)
        y = ctx.y(i, j, e)
        earlier = [ctx.y(i, j, e2) for e2 in events[:k]]
        clauses.append((-mv, y))
        clauses += [(-mv, -y2) for y2 in earlier]
        clauses.append((mv, -y) + tuple(earlier))
    for j in range(2, n):
        for i in range(1, j):
            for k, e in enumerate(events):
                clauses.append((-p[j, i], -p[j + 1, i], -m[i, j + 1, e])
                               + tuple(m[i, j, e2] for e2 in events[:k]))
    return clauses


def base_clauses(ctx: EncodingContext) -> list[tuple]:
    """Scenario, action, completeness and (optionally) symmetry constraints."""
    clauses = encode_scenarios(ctx) + encode_actions(ctx) + encode_completeness(ctx)
    if ctx.symmetry:
        clauses += encode_symmetry_bfs(ctx)
    return clauses


def _not_outputs(ctx: EncodingContext, i: int, e, outputs) -> tuple:
    """Literals of the negated output-match condition M(i, e, outputs)."""
    return tuple(-ctx.z(i, a, e) if a in outputs else ctx.z(i, a, e) for a in ctx.alphabet.actions)


def encode_negative_tree(ctx: EncodingContext) -> list[tuple]:
    """Clauses for negative-tree material added since the previous call."""
    neg = ctx.negative
    if neg.size == 1 and not neg.terminal_log and not neg.back_edge_log:
        return []
    clauses: list[tuple] = []
    if not ctx.neg_root_done:
        clauses.append((ctx.xbar(1, 1),))
        ctx.neg_root_done = True
    for child in range(ctx.neg_nodes_done + 1, neg.size + 1):
        v, e, out = neg.incoming[child]
        for i1 in ctx.states:
            body = (-ctx.xbar(v, i1),) + _not_outputs(ctx, i1, e, out)
            for i2 in ctx.states:
                clauses.append(body + (-ctx.y(i1, i2, e), ctx.xbar(child, i2)))
    ctx.neg_nodes_done = neg.size
    for v in neg.terminal_log[ctx.neg_terminals_done:]:
        clauses += [(-ctx.xbar(v, i),) for i in ctx.states]
    ctx.neg_terminals_done = len(neg.terminal_log)
    for v, u in neg.back_edge_log[ctx.neg_back_edges_done:]:
        clauses += [(-ctx.xbar(v, i), -ctx.xbar(u, i)) for i in ctx.states]
    ctx.neg_back_edges_done = len(neg.back_edge_log)
    return clauses


def fixed_fsm_clauses(ctx: EncodingContext, fsm: Fsm) -> list[tuple]:
    """Unit clauses pinning the transitions (and their outputs) that ``fsm`` defines."""
    clauses = []
    for (s, e), (d, out) in sorted(fsm.transitions.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        clauses.append((ctx.y(s, d, e),))
        clauses += [(ctx.z(s, a, e) if a in out else -ctx.z(s, a, e),) for a in ctx.alphabet.actions]
    return clauses


def decode_fsm(ctx: EncodingContext, value: Callable[[int], bool]) -> Fsm:
    """FSM of a model; ``value`` maps a positive variable id to its truth value."""
    transitions = {}
    for i1 in ctx.states:
        for e in ctx.alphabet.events:
            dests = [i2 for i2 in ctx.states if value(ctx.y(i1, i2, e))]
            if len(dests) > 1:
                raise MalformedModel(f"state {i1}, event {e!r}: several destinations {dests}")
            if dests:
                outputs = frozenset(a for a in ctx.alphabet.actions if value(ctx.z(i1, a, e)))
                transitions[(i1, e)] = (dests[0], outputs)
    return Fsm(ctx.state_count, transitions)


def clique_lower_bound(tree: ScenarioTree) -> int:
    return max(1, len(greedy_max_clique(inconsistent_pairs(tree), tree.size)))


def bfs_numbered(fsm: Fsm, alphabet: Alphabet) -> bool:
    """Whether BFS from state 1 (events in alphabet order) discovers states as 1, 2, 3, ..."""
    order = [fsm.initial]
    seen = {fsm.initial}
    for s in order:
        for e in alphabet.events:
            step = fsm.step(s, e)
            if step is not None and step[0] not in seen:
                seen.add(step[0])
                order.append(step[0])
    return order == list(range(1, fsm.state_count + 1))

