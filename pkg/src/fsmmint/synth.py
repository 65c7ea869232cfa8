"""Minimum FSM identification: Iterative SAT, Exponential SAT, QSAT, Backtracking."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import bmc, ltl
from .core import Alphabet, Fsm, ScenarioTree, build_scenario_tree, first_mismatch
from .encode import (Completeness, EncodingContext, base_clauses, clique_lower_bound,
                     decode_fsm, encode_negative_tree, fixed_fsm_clauses)
from .sat.cnf import CnfProblem, to_dimacs
from .sat.external import SolverTimeout, external_solve
from .verifier import model_check


class InternalNoProgress(RuntimeError):
    """The verifier returned only counterexamples that were already excluded."""


class NoQbfSolver(RuntimeError):
    pass


class Method(enum.Enum):
    ITERATIVE = "iterative"
    EXPONENTIAL = "exponential"
    QSAT = "qsat"
    BACKTRACKING = "backtracking"


class Outcome(enum.Enum):
    FOUND = "found"
    UNSATISFIABLE = "unsatisfiable"
    TIMEOUT = "timeout"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class Limits:
    timeout: float | None = None           # seconds of wall time
    expansion_budget: int = bmc.DEFAULT_BUDGET
    max_k: int | None = None               # bounded methods give up beyond this k


@dataclass(frozen=True)
class SynthesisRequest:
    alphabet: Alphabet
    scenarios: tuple
    formulas: tuple
    state_count: int
    mode: Completeness = Completeness.AT_LEAST_ONE
    method: Method = Method.ITERATIVE
    limits: Limits = Limits()
    qbf_solver: str | None = None
    sat_solver: str | None = None
    symmetry: bool = True

    def __post_init__(self):
        if self.state_count < 1:
            raise ValueError("state_count must be positive")
        object.__setattr__(self, "scenarios", tuple(tuple(sc) for sc in self.scenarios))
        object.__setattr__(self, "formulas", tuple(self.formulas))


@dataclass
class SynthesisStats:
    iterations: int = 0
    counterexamples: int = 0
    final_k: int | None = None
    clauses: int = 0
    variables: int = 0
    seconds: float = 0.0
    nodes: int = 0  # backtracking search nodes


@dataclass
class SynthesisResult:
    outcome: Outcome
    fsm: Fsm | None = None
    stats: SynthesisStats = field(default_factory=SynthesisStats)

    @property
    def found(self) -> bool:
        return self.outcome is Outcome.FOUND


class _Timeout(Exception):
    pass


def _deadline(limits: Limits, start: float) -> float | None:
    return None if limits.timeout is None else start + limits.timeout


def _check_time(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise _Timeout


class _SatSession:
    """Clause sink solved by the embedded incremental solver or an external command."""

    def __init__(self, ctx: EncodingContext, command: str | None):
        self.ctx = ctx
        self.command = command
        self.problem = CnfProblem(ctx.pool)
        self._external = None

    def add(self, clauses):
        self.problem.add_clauses(clauses)

    def solve(self, deadline) -> bool | None:
        if self.command is None:
            return self.problem.solve(deadline)
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        text = to_dimacs(self.problem.clauses, self.problem.num_vars)
        try:
            res = external_solve(self.command, text, timeout=remaining)
        except SolverTimeout:
            return None
        self._external = res
        return res.satisfiable

    def value(self, var: int) -> bool:
        if self.command is None:
            return self.problem.value(var)
        return self._external.value(var) if self._external.model else False


def _finish(result: SynthesisResult, start: float, session: _SatSession | None = None) -> SynthesisResult:
    result.stats.seconds = time.monotonic() - start
    if session is not None:
        result.stats.clauses = len(session.problem.clauses)
        result.stats.variables = session.problem.num_vars
    return result


# ---------------------------------------------------------------- Iterative SAT

def identify_iterative(req: SynthesisRequest, extra_clauses=(), tree: ScenarioTree | None = None,
                       deadline: float | None = None) -> SynthesisResult:
    """Solve, model check, exclude all counterexamples, repeat."""
    start = time.monotonic()
    if deadline is None:
        deadline = _deadline(req.limits, start)
    tree = tree or build_scenario_tree(req.scenarios)
    ctx = EncodingContext(req.alphabet, req.state_count, tree, req.mode, symmetry=req.symmetry)
    session = _SatSession(ctx, req.sat_solver)
    session.add(base_clauses(ctx))
    session.add(extra_clauses)
    stats = SynthesisStats()
    while True:
        session.add(encode_negative_tree(ctx))
        stats.iterations += 1
        status = session.solve(deadline)
        if status is None:
            return _finish(SynthesisResult(Outcome.TIMEOUT, stats=stats), start, session)
        if not status:
            return _finish(SynthesisResult(Outcome.UNSATISFIABLE, stats=stats), start, session)
        fsm = decode_fsm(ctx, session.value)
        cexs = [c for c in model_check(fsm, req.formulas) if c is not None]
        if not cexs:
            return _finish(SynthesisResult(Outcome.FOUND, fsm, stats), start, session)
        changed = [ctx.negative.add_counterexample(c) for c in cexs]
        stats.counterexamples += sum(changed)
        if not any(changed):
            raise InternalNoProgress("verifier counterexamples are already in the negative tree")
        if deadline is not None and time.monotonic() > deadline:
            return _finish(SynthesisResult(Outcome.TIMEOUT, stats=stats), start, session)


# ---------------------------------------------------------------- Exponential SAT / QSAT

def _bounded_loop(req: SynthesisRequest, solve_at_k) -> SynthesisResult:
    start = time.monotonic()
    deadline = _deadline(req.limits, start)
    tree = build_scenario_tree(req.scenarios)
    f = bmc.negated_spec(req.formulas)
    stats = SynthesisStats()
    k = 0
    while True:
        stats.iterations += 1
        stats.final_k = k
        ctx = EncodingContext(req.alphabet, req.state_count, tree, req.mode, symmetry=req.symmetry)
        try:
            status, fsm, size = solve_at_k(ctx, f, k, deadline)
        except bmc.BudgetExceeded:
            return _finish(SynthesisResult(Outcome.BUDGET_EXCEEDED, stats=stats), start)
        stats.clauses, stats.variables = size
        if status is None:
            return _finish(SynthesisResult(Outcome.TIMEOUT, stats=stats), start)
        if not status:
            return _finish(SynthesisResult(Outcome.UNSATISFIABLE, stats=stats), start)
        cexs = [c for c in model_check(fsm, req.formulas) if c is not None]
        if not cexs:
            return _finish(SynthesisResult(Outcome.FOUND, fsm, stats), start)
        stats.counterexamples += len(cexs)
        k += 1
        if req.limits.max_k is not None and k > req.limits.max_k:
            return _finish(SynthesisResult(Outcome.BUDGET_EXCEEDED, stats=stats), start)
        if deadline is not None and time.monotonic() > deadline:
            return _finish(SynthesisResult(Outcome.TIMEOUT, stats=stats), start)


def _solve_expansion(req: SynthesisRequest):
    def at_k(ctx, f, k, deadline):
        clauses = bmc.expand_universals(ctx, f, k, req.limits.expansion_budget)
        session = _SatSession(ctx, req.sat_solver)
        session.add(clauses)
        status = session.solve(deadline)
        fsm = decode_fsm(ctx, session.value) if status else None
        return status, fsm, (len(clauses), session.problem.num_vars)
    return at_k


def identify_exponential(req: SynthesisRequest) -> SynthesisResult:
    """k = 0, 1, ...: solve the universally expanded bounded formula, then model check."""
    return _bounded_loop(req, _solve_expansion(req))


def identify_qsat(req: SynthesisRequest) -> SynthesisResult:
    """k = 0, 1, ...: solve the QBF with an external solver, then model check.

    When the solver reports no assignment of the outer block, the FSM is
    recovered from the universal expansion at the same k.
    """
    if not req.qbf_solver:
        raise NoQbfSolver("no QBF solver command configured")
    expansion = _solve_expansion(req)

    def at_k(ctx, f, k, deadline):
        qbf = bmc.assemble_qbf(ctx, f, k)
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        try:
            res = external_solve(req.qbf_solver, qbf.to_qdimacs(), timeout=remaining)
        except SolverTimeout:
            return None, None, (len(qbf.clauses), qbf.num_vars)
        size = (len(qbf.clauses), qbf.num_vars)
        if not res.satisfiable:
            return False, None, size
        y_vars = [ctx.y(i1, i2, e) for i1 in ctx.states for i2 in ctx.states for e in req.alphabet.events]
        if res.model is not None and all(v in res.model for v in y_vars):
            return True, decode_fsm(ctx, lambda v: res.value(v)), size
        fresh = EncodingContext(req.alphabet, req.state_count, ctx.tree, req.mode, symmetry=req.symmetry)
        status, fsm, _ = expansion(fresh, f, k, deadline)
        if status is False:
            raise RuntimeError("QBF solver and universal expansion disagree")
        return status, fsm, size

    return _bounded_loop(req, at_k)


# ---------------------------------------------------------------- Backtracking

def find_frontier(tree: ScenarioTree, fsm: Fsm) -> list[tuple] | None:
    """Tree edges ``(node, event)`` the partial ``fsm`` cannot take yet; None on conflict."""
    frontier = []
    state_of = {1: fsm.initial}
    for v in tree.bfs_order():
        s = state_of.get(v)
        if s is None:
            continue
        for e, (out, child) in tree.children[v].items():
            step = fsm.step(s, e)
            if step is None:
                frontier.append((v, e))
            elif step[1] != out:
                return None
            else:
                state_of[child] = step[0]
    return frontier


class _Backtracker:
    def __init__(self, req: SynthesisRequest, deadline):
        self.req = req
        self.deadline = deadline
        self.tree = build_scenario_tree(req.scenarios)
        rank = {v: r for r, v in enumerate(self.tree.bfs_order(req.alphabet))}
        ev_rank = {e: r for r, e in enumerate(req.alphabet.events)}
        self.key = lambda edge: (rank[edge[0]], ev_rank[edge[1]])
        self.nodes = 0
        self.completions = 0

    def advance(self, fsm: Fsm, frontier: list, state_of: dict, src: int, event):
        """Frontier after adding transition (src, event); None if a scenario breaks."""
        state_of = dict(state_of)
        rest = []
        stack = []
        for v, e in frontier:
            if e == event and state_of[v] == src:
                stack.append((v, e))
            else:
                rest.append((v, e))
        while stack:
            v, e = stack.pop()
            out, child = self.tree.children[v][e]
            step = fsm.step(state_of[v], e)
            if step is None:
                rest.append((v, e))
                continue
            if step[1] != out:
                return None
            state_of[child] = step[0]
            stack.extend((child, e2) for e2 in self.tree.children[child])
        return rest, state_of

    def run(self) -> Fsm | None:
        fsm = Fsm(self.req.state_count, {})
        frontier = [(1, e) for e in self.tree.children[1]]
        if model_check(fsm, self.req.formulas, allow_dead=True) != [None] * len(self.req.formulas):
            return None
        return self.search(fsm, frontier, {1: 1}, {1})

    def search(self, fsm, frontier, state_of, visited) -> Fsm | None:
        self.nodes += 1
        _check_time(self.deadline)
        if not frontier:
            return self.close(fsm)
        v, e = min(frontier, key=self.key)
        src = state_of[v]
        out = self.tree.children[v][e][0]
        for dest in range(1, self.req.state_count + 1):
            if any(s not in visited for s in range(1, dest)):
                break
            candidate = fsm.with_transition(src, e, dest, out)
            nxt = self.advance(candidate, frontier, state_of, src, e)
            if nxt is None:
                continue
            if any(c is not None for c in model_check(candidate, self.req.formulas, allow_dead=True)):
                continue
            found = self.search(candidate, nxt[0], nxt[1], visited | {dest})
            if found is not None:
                return found
        return None

    def close(self, fsm: Fsm) -> Fsm | None:
        """Turn a scenario-complete partial FSM into a valid one, or give up on it."""
        req = self.req
        visited_fsm = fsm.canonical(req.alphabet.events)
        if req.mode is Completeness.AT_LEAST_ONE and not visited_fsm.dead_states():
            return visited_fsm
        if req.mode is Completeness.COMPLETE and visited_fsm.is_complete(req.alphabet):
            return visited_fsm
        # completion delegated to the SAT procedure with the partial FSM pinned
        self.completions += 1
        sub = SynthesisRequest(req.alphabet, req.scenarios, req.formulas, req.state_count,
                               req.mode, Method.ITERATIVE, req.limits, symmetry=False,
                               sat_solver=req.sat_solver)
        ctx = EncodingContext(req.alphabet, req.state_count, self.tree, req.mode, symmetry=False)
        result = identify_iterative(sub, fixed_fsm_clauses(ctx, fsm), self.tree, self.deadline)
        if result.outcome is Outcome.TIMEOUT:
            raise _Timeout
        if not result.found:
            return None
        return result.fsm.canonical(req.alphabet.events)


def identify_backtracking(req: SynthesisRequest) -> SynthesisResult:
    """Depth-first augmentation of a partial FSM along the scenario-tree frontier."""
    start = time.monotonic()
    bt = _Backtracker(req, _deadline(req.limits, start))
    try:
        fsm = bt.run()
    except _Timeout:
        outcome, fsm = Outcome.TIMEOUT, None
    else:
        outcome = Outcome.FOUND if fsm is not None else Outcome.UNSATISFIABLE
    stats = SynthesisStats(iterations=bt.completions, nodes=bt.nodes)
    return _finish(SynthesisResult(outcome, fsm, stats), start)


# ---------------------------------------------------------------- drivers

_METHODS = {
    Method.ITERATIVE: identify_iterative,
    Method.EXPONENTIAL: identify_exponential,
    Method.QSAT: identify_qsat,
    Method.BACKTRACKING: identify_backtracking,
}


def identify(req: SynthesisRequest) -> SynthesisResult:
    return _METHODS[req.method](req)


@dataclass
class MinimumResult:
    result: SynthesisResult
    state_count: int | None          # |S|min, None if not found up to the cap
    lower_bound: int
    per_size: list = field(default_factory=list)  # (size, outcome, seconds, iterations)


def find_minimum(alphabet: Alphabet, scenarios: Sequence, formulas: Sequence,
                 method: Method = Method.ITERATIVE, mode: Completeness = Completeness.AT_LEAST_ONE,
                 limits: Limits = Limits(), max_states: int = 20, **options) -> MinimumResult:
    """Increase |S| from the clique lower bound until an FSM is found."""
    start = time.monotonic()
    tree = build_scenario_tree(scenarios)
    lower = clique_lower_bound(tree)
    per_size = []
    result = SynthesisResult(Outcome.UNSATISFIABLE)
    for n in range(lower, max_states + 1):
        remaining = None
        if limits.timeout is not None:
            remaining = limits.timeout - (time.monotonic() - start)
            if remaining <= 0:
                result = SynthesisResult(Outcome.TIMEOUT, stats=result.stats)
                break
        sized = Limits(remaining, limits.expansion_budget, limits.max_k)
        req = SynthesisRequest(alphabet, scenarios, formulas, n, mode, method, sized, **options)
        result = identify(req)
        per_size.append((n, result.outcome, result.stats.seconds, result.stats.iterations))
        if result.outcome is Outcome.FOUND:
            return MinimumResult(result, n, lower, per_size)
        if result.outcome is not Outcome.UNSATISFIABLE:
            break
    return MinimumResult(result, None, lower, per_size)


def verify(fsm: Fsm, scenarios: Sequence, formulas: Sequence,
           mode: Completeness | None = None, alphabet: Alphabet | None = None) -> list[str]:
    """Human-readable list of problems; empty when ``fsm`` satisfies everything."""
    problems = []
    for n, sc in enumerate(scenarios, 1):
        pos = first_mismatch(fsm, sc)
        if pos is not None:
            problems.append(f"scenario {n} fails at element {pos}")
    dead = fsm.dead_states()
    if dead:
        problems.append(f"states without outgoing transitions: {dead}")
    elif formulas:
        for f, cex in zip(formulas, model_check(fsm, formulas)):
            if cex is not None:
                problems.append(f"{ltl.to_string(f)} violated by {cex.format(alphabet)}")
    if mode is Completeness.COMPLETE and alphabet is not None and not fsm.is_complete(alphabet):
        problems.append("FSM is not complete")
    return problems

