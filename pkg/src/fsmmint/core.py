"""Domain model: alphabets, FSMs, Kripke semantics, scenario trees."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

Outputs = frozenset
Element = tuple  # (event, frozenset of actions)


class DeterminismConflict(ValueError):
    """Two scenarios demand different outputs for one event at one tree node."""


class DeadState(ValueError):
    """An FSM state has no outgoing transition."""


class UnknownSymbol(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    events: tuple
    actions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.events:
            raise ValueError("alphabet needs at least one event")
        if len(set(self.events)) != len(self.events):
            raise ValueError("duplicate event symbol")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("duplicate action symbol")

    @classmethod
    def numbered(cls, n_events: int, n_actions: int) -> "Alphabet":
        return cls(tuple(f"e{i}" for i in range(1, n_events + 1)),
                   tuple(f"z{i}" for i in range(1, n_actions + 1)))

    def sort_actions(self, actions: Iterable[str]) -> tuple:
        order = {a: i for i, a in enumerate(self.actions)}
        return tuple(sorted(actions, key=lambda a: order.get(a, len(order))))

    def check_element(self, element: Element) -> None:
        event, outputs = element
        if event not in self.events:
            raise UnknownSymbol(f"unknown event {event!r}")
        for a in outputs:
            if a not in self.actions:
                raise UnknownSymbol(f"unknown action {a!r}")


def element(event: str, *actions: str) -> Element:
    return (event, frozenset(actions))


@dataclass(frozen=True)
class Fsm:
    """Deterministic Mealy machine; states are 1..state_count, initial state is 1.

    ``transitions`` maps ``(state, event)`` to ``(destination, outputs)``.
    """

    state_count: int
    transitions: Mapping = field(default_factory=dict)
    initial: int = 1

    def __post_init__(self):
        if self.state_count < 1:
            raise ValueError("state_count must be positive")
        trans = {}
        for (s, e), (d, out) in self.transitions.items():
            if not (1 <= s <= self.state_count and 1 <= d <= self.state_count):
                raise ValueError(f"state index out of range in {(s, e, d)}")
            trans[(s, e)] = (d, frozenset(out))
        object.__setattr__(self, "transitions", trans)

    def __hash__(self):
        return hash((self.state_count, frozenset(self.transitions.items())))

    def step(self, state: int, event: str):
        return self.transitions.get((state, event))

    def outgoing(self, state: int) -> list:
        return [(e, d, out) for (s, e), (d, out) in self.transitions.items() if s == state]

    def dead_states(self) -> list[int]:
        live = {s for (s, _e) in self.transitions}
        return [s for s in range(1, self.state_count + 1) if s not in live]

    def is_complete(self, alphabet: Alphabet) -> bool:
        return all((s, e) in self.transitions
                   for s in range(1, self.state_count + 1) for e in alphabet.events)

    def reachable(self) -> set[int]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for _e, d, _out in self.outgoing(s):
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
        return seen

    def with_transition(self, state: int, event: str, dest: int, outputs) -> "Fsm":
        trans = dict(self.transitions)
        trans[(state, event)] = (dest, frozenset(outputs))
        return Fsm(self.state_count, trans)

    def canonical(self, events: Sequence) -> "Fsm":
        """Reachable part, renumbered in BFS order with children visited in ``events`` order."""
        order = [self.initial]
        index = {self.initial: 1}
        for s in order:
            for e in events:
                step = self.transitions.get((s, e))
                if step is not None and step[0] not in index:
                    index[step[0]] = len(order) + 1
                    order.append(step[0])
        trans = {(index[s], e): (index[d], out)
                 for (s, e), (d, out) in self.transitions.items() if s in index}
        return Fsm(len(order), trans)


@dataclass(frozen=True)
class KripkeStructure:
    """One state per FSM transition ``(src, event, outputs, dst)``."""

    states: tuple
    initial: tuple
    successors: tuple
    labels: tuple

    def __len__(self):
        return len(self.states)


def atom_label(event: str, outputs) -> frozenset:
    return frozenset([("wasEvent", event)] + [("wasAction", a) for a in outputs])


def fsm_to_kripke(fsm: Fsm, allow_dead: bool = False) -> KripkeStructure:
    if not allow_dead:
        dead = fsm.dead_states()
        if dead:
            raise DeadState(f"states without outgoing transitions: {dead}")
    quads = sorted(((s, e, out, d) for (s, e), (d, out) in fsm.transitions.items()),
                   key=lambda q: (q[0], str(q[1])))
    by_src: dict[int, list[int]] = {}
    for idx, (s, _e, _o, _d) in enumerate(quads):
        by_src.setdefault(s, []).append(idx)
    successors = tuple(tuple(by_src.get(d, ())) for (_s, _e, _o, d) in quads)
    initial = tuple(by_src.get(fsm.initial, ()))
    labels = tuple(atom_label(e, out) for (_s, e, out, _d) in quads)
    return KripkeStructure(tuple(quads), initial, successors, labels)


Scenario = tuple  # tuple of elements


def first_mismatch(fsm: Fsm, scenario: Sequence[Element]) -> int | None:
    """1-based position where ``fsm`` fails to reproduce ``scenario``, or None."""
    state = fsm.initial
    for pos, (event, outputs) in enumerate(scenario, 1):
        step = fsm.transitions.get((state, event))
        if step is None or step[1] != outputs:
            return pos
        state = step[0]
    return None


def accepts(fsm: Fsm, scenario: Sequence[Element]) -> bool:
    return first_mismatch(fsm, scenario) is None


class ScenarioTree:
    """Prefix tree of positive scenarios; node 1 is the root.

    ``children[v]`` maps an event to ``(outputs, child)``.  Children are always
    created after their parent, so child indices exceed parent indices.
    """

    def __init__(self):
        self.children: list[dict] = [{}, {}]  # index 0 unused
        self.parent: list = [None, None]

    @property
    def size(self) -> int:
        return len(self.children) - 1

    def nodes(self) -> range:
        return range(1, len(self.children))

    def edges(self) -> Iterator[tuple]:
        """Yield ``(v, event, outputs, child)``."""
        for v in self.nodes():
            for e, (out, c) in self.children[v].items():
                yield v, e, out, c

    def add(self, scenario: Sequence[Element]) -> None:
        v = 1
        for event, outputs in scenario:
            outputs = frozenset(outputs)
            edge = self.children[v].get(event)
            if edge is None:
                self.children.append({})
                self.parent.append(v)
                child = len(self.children) - 1
                self.children[v][event] = (outputs, child)
                v = child
            else:
                if edge[0] != outputs:
                    raise DeterminismConflict(
                        f"node {v}, event {event!r}: outputs {sorted(edge[0])} vs {sorted(outputs)}")
                v = edge[1]

    def bfs_order(self, alphabet: Alphabet | None = None) -> list[int]:
        rank = {e: i for i, e in enumerate(alphabet.events)} if alphabet else None
        order = [1]
        for v in order:
            events = list(self.children[v])
            if rank is not None:
                events.sort(key=lambda e: rank[e])
            order.extend(self.children[v][e][1] for e in events)
        return order


def build_scenario_tree(scenarios: Iterable[Sequence[Element]]) -> ScenarioTree:
    tree = ScenarioTree()
    for sc in scenarios:
        tree.add(sc)
    return tree


def inconsistent_pairs(tree: ScenarioTree) -> set[tuple[int, int]]:
    """Unordered pairs ``(u, v)``, ``u < v``, that no FSM state can share.

    Since both children of a compared pair have larger indices than the pair,
    sweeping the smaller index downwards settles every dependency first.
    """
    n = tree.size
    result: set[tuple[int, int]] = set()
    children = tree.children
    for u in range(n, 0, -1):
        cu = children[u]
        if not cu:
            continue
        for v in range(u + 1, n + 1):
            cv = children[v]
            if not cv:
                continue
            for e, (out_u, child_u) in cu.items():
                edge = cv.get(e)
                if edge is None:
                    continue
                out_v, child_v = edge
                if out_u != out_v:
                    result.add((u, v))
                    break
                pair = (child_u, child_v) if child_u < child_v else (child_v, child_u)
                if pair in result:
                    result.add((u, v))
                    break
    return result


def greedy_max_clique(pairs: Iterable[tuple[int, int]], node_count: int) -> set[int]:
    """Greedy clique in the inconsistency graph, highest degree first."""
    if node_count < 1:
        return set()
    adj: dict[int, set[int]] = {v: set() for v in range(1, node_count + 1)}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    start = max(adj, key=lambda v: (len(adj[v]), -v))
    clique = {start}
    candidates = set(adj[start])
    while candidates:
        best = max(candidates, key=lambda v: (len(adj[v] & candidates), len(adj[v]), -v))
        clique.add(best)
        candidates &= adj[best]
    return clique


@dataclass(frozen=True)
class Counterexample:
    """Finite bad prefix (empty cycle) or lasso ``prefix (cycle)^ω``."""

    prefix: tuple
    cycle: tuple = ()

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    def format(self, alphabet: Alphabet | None = None) -> str:
        def fmt(el):
            e, out = el
            acts = alphabet.sort_actions(out) if alphabet else sorted(out)
            return f"({e}, {','.join(acts)})"

        parts = [fmt(el) for el in self.prefix]
        if self.cycle:
            parts.append("[" + ", ".join(fmt(el) for el in self.cycle) + "]")
        return ", ".join(parts)


class NegativeScenarioTree:
    """Prefix tree of prohibited behaviours.

    Several edges per event are allowed at one node.  Growth is append-only and
    logged (``nodes``, ``terminal_log``, ``back_edge_log``) so clause emission
    can be incremental.
    """

    def __init__(self):
        self.edges: list[list] = [[], []]  # per node: [(event, outputs, child)]
        self.incoming: list = [None, None]  # per node: (parent, event, outputs)
        self.terminal: set[int] = set()
        self.back_edges: set[tuple[int, int]] = set()
        self.terminal_log: list[int] = []
        self.back_edge_log: list[tuple[int, int]] = []

    @property
    def size(self) -> int:
        return len(self.edges) - 1

    def _walk(self, v: int, el: Element) -> int:
        event, outputs = el[0], frozenset(el[1])
        for e, out, child in self.edges[v]:
            if e == event and out == outputs:
                return child
        self.edges.append([])
        child = len(self.edges) - 1
        self.incoming.append((v, event, outputs))
        self.edges[v].append((event, outputs, child))
        return child

    def add_counterexample(self, cex: Counterexample) -> bool:
        """Insert ``cex``; return False if it was already present."""
        v = 1
        for el in cex.prefix:
            v = self._walk(v, el)
        if cex.is_finite:
            if v in self.terminal:
                return False
            self.terminal.add(v)
            self.terminal_log.append(v)
            return True
        start = v
        for el in cex.cycle:
            v = self._walk(v, el)
        edge = (v, start)
        if edge in self.back_edges:
            return False
        self.back_edges.add(edge)
        self.back_edge_log.append(edge)
        return True

    def paths(self) -> Iterator[Counterexample]:
        """Reconstruct the stored counterexamples."""

        def path_to(v):
            path = []
            while v != 1:
                parent, e, out = self.incoming[v]
                path.append((e, out))
                v = parent
            return tuple(reversed(path))

        for v in self.terminal_log:
            yield Counterexample(path_to(v))
        for v, u in self.back_edge_log:
            full = path_to(v)
            cut = len(path_to(u))
            yield Counterexample(full[:cut], full[cut:])


def executes(fsm: Fsm, cex: Counterexample) -> bool:
    """Whether ``fsm`` can perform the prohibited behaviour ``cex``."""
    state = fsm.initial
    for event, outputs in cex.prefix:
        step = fsm.transitions.get((state, event))
        if step is None or step[1] != outputs:
            return False
        state = step[0]
    if cex.is_finite:
        return True
    start = state
    for event, outputs in cex.cycle:
        step = fsm.transitions.get((state, event))
        if step is None or step[1] != outputs:
            return False
        state = step[0]
    return state == start
