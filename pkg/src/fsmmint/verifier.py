"""Explicit-state LTL model checking of FSMs with short counterexamples.

Each negated property is translated into a Büchi automaton by tableau
expansion, multiplied with the FSM's Kripke structure, and searched for an
accepting lasso (or a bad prefix, when the automaton reaches its
accept-everything state).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import ltl
from .core import Counterexample, Fsm, KripkeStructure, fsm_to_kripke
from .ltl import (ATOMS, Const, Finally, Formula, Globally, Next, Not, Release,
                  Until)


@dataclass(frozen=True)
class BuchiState:
    pos: frozenset      # atoms that must hold
    neg: frozenset      # atoms that must not hold
    accept_all: bool    # every continuation from here is accepted

    def admits(self, label: frozenset) -> bool:
        return self.pos <= label and not (self.neg & label)


@dataclass(frozen=True)
class BuchiAutomaton:
    """State-labelled Büchi automaton with a single acceptance set.

    A run reads letter ``i`` in state ``i``; ``states[q].admits(letter)`` must hold.
    """

    states: tuple
    initial: tuple
    successors: tuple
    accepting: frozenset

    def __len__(self):
        return len(self.states)


def _atom_key(a) -> tuple:
    return ("wasEvent" if isinstance(a, ltl.WasEvent) else "wasAction", a.name)


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    return _ltl_to_buchi(ltl.to_nnf(f))


@lru_cache(maxsize=512)
def _ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    # tableau nodes: (old, next) after full expansion; 'init' is a pseudo-source
    untils = sorted({g for g in _subformulas(f) if isinstance(g, (Until, Finally))}, key=repr)

    finished: dict[tuple, int] = {}          # (old, next) -> node id
    node_info: list[tuple] = []              # (old, next)
    incoming: list[set] = []

    def expand(new, old, nxt, sources):
        stack = [(frozenset(new), frozenset(old), frozenset(nxt))]
        while stack:
            new, old, nxt = stack.pop()
            if not new:
                key = (old, nxt)
                nid = finished.get(key)
                if nid is None:
                    nid = len(node_info)
                    finished[key] = nid
                    node_info.append(key)
                    incoming.append(set(sources))
                    pending.append(nid)
                else:
                    incoming[nid] |= sources
                continue
            g = min(new, key=repr)
            new = new - {g}
            if g in old:
                stack.append((new, old, nxt))
                continue
            if isinstance(g, Const):
                if g.value:
                    stack.append((new, old | {g}, nxt))
                continue
            if isinstance(g, ATOMS):
                if Not(g) in old:
                    continue
                stack.append((new, old | {g}, nxt))
            elif isinstance(g, Not):
                if g.arg in old:
                    continue
                stack.append((new, old | {g}, nxt))
            elif isinstance(g, ltl.And):
                stack.append((new | ({g.left, g.right} - old), old | {g}, nxt))
            elif isinstance(g, ltl.Or):
                stack.append((new | ({g.left} - old), old | {g}, nxt))
                stack.append((new | ({g.right} - old), old | {g}, nxt))
            elif isinstance(g, Next):
                stack.append((new, old | {g}, nxt | {g.arg}))
            elif isinstance(g, Globally):
                stack.append((new | ({g.arg} - old), old | {g}, nxt | {g}))
            elif isinstance(g, Finally):
                stack.append((new, old | {g}, nxt | {g}))
                stack.append((new | ({g.arg} - old), old | {g}, nxt))
            elif isinstance(g, Until):
                stack.append((new | ({g.left} - old), old | {g}, nxt | {g}))
                stack.append((new | ({g.right} - old), old | {g}, nxt))
            elif isinstance(g, Release):
                stack.append((new | ({g.right} - old), old | {g}, nxt | {g}))
                stack.append((new | ({g.left, g.right} - old), old | {g}, nxt))
            else:
                raise TypeError(f"formula not in NNF: {g!r}")

    pending: list[int] = []
    expand({f}, set(), set(), {-1})
    while pending:
        nid = pending.pop()
        expand(node_info[nid][1], set(), set(), {nid})

    n = len(node_info)
    succ = [[] for _ in range(n)]
    initial = []
    for nid, srcs in enumerate(incoming):
        for s in srcs:
            if s == -1:
                initial.append(nid)
            else:
                succ[s].append(nid)

    nodes = []
    for old, nxt in node_info:
        pos = frozenset(_atom_key(g) for g in old if isinstance(g, ATOMS))
        neg = frozenset(_atom_key(g.arg) for g in old if isinstance(g, Not))
        nodes.append(BuchiState(pos, neg, accept_all=not nxt and not pos and not neg))

    # generalized acceptance: one set per until/finally obligation
    acc_sets = []
    for u in untils:
        goal = u.arg if isinstance(u, Finally) else u.right
        acc_sets.append({nid for nid, (old, _nx) in enumerate(node_info)
                         if u not in old or goal in old})

    # counter-based degeneralization
    m = max(1, len(acc_sets))
    if not acc_sets:
        acc_sets = [set(range(n))]
    states, index, succ_out = [], {}, []

    def state_id(nid, c):
        key = (nid, c)
        if key not in index:
            index[key] = len(states)
            states.append(key)
            succ_out.append(None)
        return index[key]

    init = [state_id(nid, 0) for nid in sorted(set(initial))]
    queue = deque(init)
    while queue:
        sid = queue.popleft()
        if succ_out[sid] is not None:
            continue
        nid, c = states[sid]
        c2 = (c + 1) % m if nid in acc_sets[c] else c
        out = []
        for t in sorted(set(succ[nid])):
            tid = state_id(t, c2)
            out.append(tid)
            if succ_out[tid] is None:
                queue.append(tid)
        succ_out[sid] = tuple(out)
    accepting = frozenset(sid for sid, (nid, c) in enumerate(states) if c == 0 and nid in acc_sets[0])
    return BuchiAutomaton(tuple(nodes[nid] for nid, _c in states), tuple(init),
                          tuple(succ_out), accepting)


def _subformulas(f: Formula):
    yield f
    for c in ltl.children(f):
        yield from _subformulas(c)


def _tarjan(n: int, succ) -> list[int]:
    """SCC id per vertex (iterative Tarjan)."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp


def find_counterexample(kripke: KripkeStructure, automaton: BuchiAutomaton) -> Counterexample | None:
    """Shortest-prefix accepting run of the product, or None if the language is empty."""
    elements = [(e, out) for (_s, e, out, _d) in kripke.states]
    nb = len(automaton)
    # product states are encoded as q * nb + b
    pindex: dict[int, int] = {}
    pstates: list[int] = []
    parent: list[int] = []
    psucc: list[list[int]] = []

    def visit(code, par):
        pid = pindex.get(code)
        if pid is None:
            pid = len(pstates)
            pindex[code] = pid
            pstates.append(code)
            parent.append(par)
            psucc.append(None)
            queue.append(pid)
        return pid

    queue: deque[int] = deque()
    for q in kripke.initial:
        for b in automaton.initial:
            if automaton.states[b].admits(kripke.labels[q]):
                visit(q * nb + b, -1)
    bfs_order = []
    while queue:
        pid = queue.popleft()
        bfs_order.append(pid)
        q, b = divmod(pstates[pid], nb)
        out = []
        for q2 in kripke.successors[q]:
            label = kripke.labels[q2]
            for b2 in automaton.successors[b]:
                if automaton.states[b2].admits(label):
                    out.append(visit(q2 * nb + b2, pid))
        psucc[pid] = out

    def path_to(pid):
        path = []
        while pid != -1:
            path.append(pid)
            pid = parent[pid]
        return path[::-1]

    n = len(pstates)
    comp = _tarjan(n, psucc)
    comp_size: dict[int, int] = {}
    for c in comp:
        comp_size[c] = comp_size.get(c, 0) + 1
    good_comp = set()
    for pid in range(n):
        if pstates[pid] % nb in automaton.accepting:
            c = comp[pid]
            if comp_size[c] > 1 or pid in psucc[pid]:
                good_comp.add(c)

    for pid in bfs_order:
        q, b = divmod(pstates[pid], nb)
        bstate = automaton.states[b]
        # bad prefix: the automaton accepts every continuation after this letter
        if all(automaton.states[b2].accept_all for b2 in automaton.successors[b]) and automaton.successors[b]:
            path = path_to(pid)
            if bstate.accept_all:
                path = path[:-1]
            return Counterexample(tuple(elements[pstates[p] // nb] for p in path))
        if comp[pid] in good_comp:
            cycle = _shortest_accepting_cycle(pid, comp, psucc, pstates, nb, automaton.accepting)
            prefix = path_to(pid)[:-1]
            return Counterexample(tuple(elements[pstates[p] // nb] for p in prefix),
                                  tuple(elements[pstates[p] // nb] for p in cycle))
    return None


def _shortest_accepting_cycle(start, comp, psucc, pstates, nb, accepting):
    """Product states of the shortest cycle from ``start`` through an accepting state."""
    c = comp[start]
    fwd = {start: None}
    order = deque([start])
    while order:
        v = order.popleft()
        for w in psucc[v]:
            if comp[w] == c and w not in fwd:
                fwd[w] = v
                order.append(w)
    pred: dict[int, list[int]] = {}
    for v in fwd:
        for w in psucc[v]:
            if comp[w] == c:
                pred.setdefault(w, []).append(v)
    bwd = {start: None}
    order = deque([start])
    while order:
        v = order.popleft()
        for u in pred.get(v, ()):
            if u not in bwd:
                bwd[u] = v
                order.append(u)

    def dist(tree, v):
        d = 0
        while tree[v] is not None:
            v = tree[v]
            d += 1
        return d

    def walk(tree, v):
        path = []
        while v is not None:
            path.append(v)
            v = tree[v]
        return path

    best = None  # (length, kind, node)
    if pstates[start] % nb in accepting:
        for u in pred.get(start, ()):
            cand = (dist(fwd, u) + 1, 0, u)
            if best is None or cand < best:
                best = cand
    for a in fwd:
        if a != start and pstates[a] % nb in accepting and a in bwd:
            cand = (dist(fwd, a) + dist(bwd, a), 1, a)
            if best is None or cand < best:
                best = cand
    _length, kind, node = best
    head = walk(fwd, node)[::-1]            # start .. node
    if kind == 0:
        return head                         # node -> start closes the cycle
    return head + walk(bwd, bwd[node])[:-1]  # node .. (excluding start)


def model_check(fsm: Fsm, formulas: Sequence[Formula], allow_dead: bool = False) -> list[Counterexample | None]:
    """Per formula: None if it holds on every run of ``fsm``, else a counterexample.

    With ``allow_dead`` the FSM may have states without outgoing transitions;
    runs into such states are ignored unless they already form a bad prefix.
    """
    kripke = fsm_to_kripke(fsm, allow_dead=allow_dead)
    return [find_counterexample(kripke, _ltl_to_buchi(ltl.negate(g))) for g in formulas]


def holds(fsm: Fsm, formula: Formula) -> bool:
    return model_check(fsm, [formula])[0] is None
