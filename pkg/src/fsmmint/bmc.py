"""Bounded model checking encodings over path variables sigma/eps/zeta.

A path has positions ``0..k``; position ``j`` is one FSM transition: its
source state (``sigma(i, j)``), its event (``eps(e, j)``) and its actions
(``zeta(a, j)``).  The witness condition ``W`` states that the path shows the
(negated) specification to be violated, either as a plain prefix or as a
``(k, l)``-loop.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

from . import ltl
from .core import Fsm, ScenarioTree
from .encode import Completeness, EncodingContext, base_clauses
from .ltl import Formula
from .sat.circuit import (FALSE, TRUE, And, Circuit, Const, Iff, Implies, Lit, Not, Or,
                          Tseitin)
from .sat.cnf import CnfProblem, to_qdimacs


class BudgetExceeded(RuntimeError):
    """The universal expansion would exceed the configured clause budget."""


DEFAULT_BUDGET = 20_000_000


# ---------------------------------------------------------------- circuit building

class Builder:
    """Circuit constructors; ``fold`` simplifies constants and shares equal nodes."""

    def __init__(self, fold: bool = False):
        self.fold = fold
        self._lits: dict[int, Lit] = {}
        self._nodes: dict[tuple, Circuit] = {}

    def lit(self, x: int) -> Circuit:
        if not self.fold:
            return Lit(x)
        node = self._lits.get(x)
        if node is None:
            node = self._lits[x] = Lit(x)
        return node

    def const(self, value: bool) -> Circuit:
        return TRUE if value else FALSE

    def not_(self, c: Circuit) -> Circuit:
        if isinstance(c, Lit):
            return self.lit(-c.lit)
        if not self.fold:
            return Not(c)
        if isinstance(c, Const):
            return FALSE if c.value else TRUE
        if isinstance(c, Not):
            return c.arg
        return self._share(("not", id(c)), lambda: Not(c))

    def and_(self, args) -> Circuit:
        return self._nary(True, list(args))

    def or_(self, args) -> Circuit:
        return self._nary(False, list(args))

    def _nary(self, is_and: bool, args: list) -> Circuit:
        cls = And if is_and else Or
        if not self.fold:
            return args[0] if len(args) == 1 else cls(*args)
        kept, seen = [], set()
        for a in args:
            if isinstance(a, Const):
                if a.value != is_and:
                    return a
                continue
            if id(a) not in seen:
                seen.add(id(a))
                kept.append(a)
        if not kept:
            return self.const(is_and)
        if len(kept) == 1:
            return kept[0]
        key = ("and" if is_and else "or",) + tuple(sorted(id(a) for a in kept))
        return self._share(key, lambda: cls(*kept))

    def _share(self, key, make):
        node = self._nodes.get(key)
        if node is None:
            node = self._nodes[key] = make()
            # keep children alive: ids in keys must not be recycled
        return node


# ---------------------------------------------------------------- path variables

@dataclass(frozen=True)
class PathVars:
    ctx: EncodingContext
    k: int

    def sigma(self, i, j) -> int:
        return self.ctx.pool("sigma", i, j)

    def eps(self, e, j) -> int:
        return self.ctx.pool("eps", e, j)

    def zeta(self, a, j) -> int:
        return self.ctx.pool("zeta", a, j)

    def allocate(self) -> list[int]:
        """Allocate all path variables (ordered eps, sigma, zeta by position) and list them."""
        ids = []
        for j in range(self.k + 1):
            ids += [self.eps(e, j) for e in self.ctx.alphabet.events]
        for j in range(self.k + 1):
            ids += [self.sigma(i, j) for i in self.ctx.states]
        for j in range(self.k + 1):
            ids += [self.zeta(a, j) for a in self.ctx.alphabet.actions]
        return ids


@dataclass
class BmcPieces:
    """Path-validity conjuncts, loop conditions and (optionally) the witness ``W``."""

    k: int
    init: Circuit
    p_sigma: list
    p_eps: list
    p_y: list
    p_yk: list
    p_z: list
    loops: list          # loops[l] is the (k, l)-loop condition
    any_loop: Circuit
    witness: Circuit | None = None

    def path_validity(self) -> Circuit:
        return And(self.init, *self.p_sigma, *self.p_eps, *self.p_y, *self.p_yk, *self.p_z)


def _exactly_one(lits: list[int]) -> list[Circuit]:
    out = [Or(*[Lit(x) for x in lits]) if len(lits) > 1 else Lit(lits[0])]
    out += [Not(And(Lit(a), Lit(b))) for a, b in combinations(lits, 2)]
    return out


def build_path_validity(ctx: EncodingContext, k: int) -> BmcPieces:
    if k < 0:
        raise ValueError("k must be non-negative")
    pv = PathVars(ctx, k)
    pv.allocate()
    S, E, Z = ctx.states, ctx.alphabet.events, ctx.alphabet.actions
    p_sigma, p_eps = [], []
    for j in range(k + 1):
        p_sigma += _exactly_one([pv.sigma(i, j) for i in S])
        p_eps += _exactly_one([pv.eps(e, j) for e in E])
    p_y = [Implies(And(Lit(pv.sigma(i1, j)), Lit(pv.eps(e, j)), Lit(pv.sigma(i2, j + 1))),
                   Lit(ctx.y(i1, i2, e)))
           for j in range(k) for i1 in S for i2 in S for e in E]
    p_yk = []
    if ctx.mode is not Completeness.COMPLETE:
        p_yk = [Implies(And(Lit(pv.sigma(i1, k)), Lit(pv.eps(e, k))),
                        Or(*[Lit(ctx.y(i1, i2, e)) for i2 in S]))
                for i1 in S for e in E]
    p_z = [Implies(And(Lit(pv.sigma(i, j)), Lit(pv.eps(e, j))),
                   Iff(Lit(pv.zeta(a, j)), Lit(ctx.z(i, a, e))))
           for j in range(k + 1) for i in S for a in Z for e in E]
    loops = build_loops(ctx, k)
    return BmcPieces(k, Lit(pv.sigma(1, 0)), p_sigma, p_eps, p_y, p_yk, p_z, loops, Or(*loops))


def build_loops(ctx: EncodingContext, k: int) -> list[Circuit]:
    pv = PathVars(ctx, k)
    S, E = ctx.states, ctx.alphabet.events
    return [Or(*[And(Lit(pv.sigma(i1, k)), Lit(pv.eps(e, k)), Lit(pv.sigma(i2, l)),
                     Lit(ctx.y(i1, i2, e)))
                 for i1 in S for i2 in S for e in E])
            for l in range(k + 1)]


# ---------------------------------------------------------------- translation

Atom = Callable[[Formula, int], Circuit]


def symbolic_atoms(ctx: EncodingContext, b: Builder | None = None) -> Atom:
    """Atoms as path variables: wasEvent(e) at j is eps(e, j), wasAction(a) is zeta(a, j)."""
    b = b or Builder()
    pool = ctx.pool

    def atom(f, j):
        if isinstance(f, ltl.WasEvent):
            return b.lit(pool("eps", f.name, j))
        return b.lit(pool("zeta", f.name, j))

    return atom


def translate(f: Formula, j: int, k: int, loop: int | None, atom: Atom,
              b: Builder | None = None, memo: dict | None = None) -> Circuit:
    """Translation of NNF formula ``f`` at position ``j`` of a ``k``-bounded path.

    ``loop=None`` gives the no-loop translation, ``loop=l`` the one for a
    ``(k, l)``-loop.
    """
    b = b or Builder()
    memo = {} if memo is None else memo
    if not 0 <= j <= k:
        raise ValueError("position out of range")
    if loop is not None and not 0 <= loop <= k:
        raise ValueError("loop start out of range")

    def succ(i):
        return i + 1 if i < k else loop

    def tr(g, i):
        key = (g, i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(g, ltl.Const):
            r = b.const(g.value)
        elif isinstance(g, ltl.ATOMS):
            r = atom(g, i)
        elif isinstance(g, ltl.Not):
            if not isinstance(g.arg, ltl.ATOMS):
                raise ValueError("formula is not in negation normal form")
            r = b.not_(atom(g.arg, i))
        elif isinstance(g, ltl.And):
            r = b.and_([tr(g.left, i), tr(g.right, i)])
        elif isinstance(g, ltl.Or):
            r = b.or_([tr(g.left, i), tr(g.right, i)])
        elif isinstance(g, ltl.Next):
            if loop is None:
                r = tr(g.arg, i + 1) if i < k else b.const(False)
            else:
                r = tr(g.arg, succ(i))
        elif isinstance(g, ltl.Globally):
            if loop is None:
                r = b.const(False)
            else:
                r = b.and_([tr(g.arg, n) for n in range(min(i, loop), k + 1)])
        elif isinstance(g, ltl.Finally):
            lo = i if loop is None else min(i, loop)
            r = b.or_([tr(g.arg, n) for n in range(lo, k + 1)])
        elif isinstance(g, ltl.Until):
            f1, f2 = g.left, g.right
            parts = [b.and_([tr(f2, n)] + [tr(f1, m) for m in range(i, n)]) for n in range(i, k + 1)]
            if loop is not None:
                parts += [b.and_([tr(f2, n)] + [tr(f1, m) for m in range(i, k + 1)]
                                 + [tr(f1, m) for m in range(loop, n)])
                          for n in range(loop, i)]
            r = b.or_(parts)
        elif isinstance(g, ltl.Release):
            f1, f2 = g.left, g.right
            parts = []
            if loop is not None:
                parts.append(b.and_([tr(f2, n) for n in range(min(i, loop), k + 1)]))
            parts += [b.and_([tr(f1, n)] + [tr(f2, m) for m in range(i, n + 1)]) for n in range(i, k + 1)]
            if loop is not None:
                parts += [b.and_([tr(f1, n)] + [tr(f2, m) for m in range(i, k + 1)]
                                 + [tr(f2, m) for m in range(loop, n + 1)])
                          for n in range(loop, i)]
            r = b.or_(parts)
        else:
            raise ValueError(f"formula is not in negation normal form: {g!r}")
        memo[key] = r
        return r

    return tr(f, j)


def build_witness(f: Formula, ctx: EncodingContext, k: int, loops: list | None = None,
                  atom: Atom | None = None, b: Builder | None = None) -> Circuit:
    """``(not L_k and [[f]]) or OR_l (lL_k and l[[f]])`` for NNF ``f``."""
    b = b or Builder()
    atom = atom or symbolic_atoms(ctx, b)
    if loops is None:
        loops = build_loops(ctx, k)
    any_loop = b.or_(loops)
    parts = [b.and_([b.not_(any_loop), translate(f, 0, k, None, atom, b)])]
    for l, lc in enumerate(loops):
        parts.append(b.and_([lc, translate(f, 0, k, l, atom, b)]))
    return b.or_(parts)


def bmc_pieces(f: Formula, ctx: EncodingContext, k: int) -> BmcPieces:
    pieces = build_path_validity(ctx, k)
    pieces.witness = build_witness(f, ctx, k, pieces.loops)
    return pieces


def negated_spec(formulas) -> Formula:
    """NNF of the negated conjunction of ``formulas``."""
    return ltl.negate(ltl.conjoin(formulas))


# ---------------------------------------------------------------- QBF assembly

@dataclass
class Qbf:
    blocks: list          # [("e"|"a", [vars])], outermost first
    clauses: list
    ctx: EncodingContext

    @property
    def num_vars(self) -> int:
        return self.ctx.pool.top

    def to_qdimacs(self) -> str:
        return to_qdimacs(self.clauses, self.blocks, self.num_vars)

    def describe(self) -> str:
        """Prefix and matrix with symbolic variable names."""
        label = self.ctx.pool.label
        lines = []
        for q, vs in self.blocks:
            word = "exists" if q == "e" else "forall"
            lines.append(f"{word} " + " ".join(label(v) for v in vs))
        lines += [" ".join(label(l) for l in c) for c in self.clauses]
        return "\n".join(lines) + "\n"


def assemble_qbf(ctx: EncodingContext, f: Formula, k: int) -> Qbf:
    """exists x,y,z . forall sigma,eps,zeta . exists aux . S Z B C (not [[M]]_k or not W)."""
    outer = ctx.fsm_vars()
    clauses = base_clauses(ctx)
    pv = PathVars(ctx, k)
    universal = pv.allocate()
    pieces = bmc_pieces(f, ctx, k)
    ts = Tseitin(ctx.pool.aux)
    ts.assert_true(Or(Not(pieces.path_validity()), Not(pieces.witness)))
    clauses += ts.clauses
    taken = set(outer) | set(universal)
    inner = [v for v in range(1, ctx.pool.top + 1) if v not in taken]
    blocks = [("e", outer), ("a", universal), ("e", inner)]
    return Qbf([b for b in blocks if b[1]], clauses, ctx)


# ---------------------------------------------------------------- universal expansion

def expansion_size(ctx: EncodingContext, k: int) -> int:
    """Number of valid (sigma, eps) assignments: |S|^k |E|^(k+1)."""
    return ctx.state_count ** k * len(ctx.alphabet.events) ** (k + 1)


def expand_universals(ctx: EncodingContext, f: Formula, k: int,
                      budget: int = DEFAULT_BUDGET) -> list[tuple]:
    """Clauses of S Z B C and, per valid path ``t``, (not P_y or not P_y^k or not W)|t."""
    terms = expansion_size(ctx, k)
    if terms > budget:
        raise BudgetExceeded(f"{terms} expansion terms exceed the budget of {budget} clauses")
    clauses = base_clauses(ctx)
    base = len(clauses)
    b = Builder(fold=True)
    ts = Tseitin(ctx.pool.aux)
    S, E = ctx.states, ctx.alphabet.events
    complete = ctx.mode is Completeness.COMPLETE
    no_witness = isinstance(f, ltl.Const) and not f.value
    if no_witness:
        return clauses
    for n, (rest, events) in enumerate(zip_product(S, E, k)):
        states = (1,) + rest

        def atom(g, j, states=states, events=events):
            if isinstance(g, ltl.WasEvent):
                return b.const(events[j] == g.name)
            return b.lit(ctx.z(states[j], g.name, events[j]))

        loops = [b.lit(ctx.y(states[k], states[l], events[k])) for l in range(k + 1)]
        w = build_witness(f, ctx, k, loops, atom, b)
        parts = [b.lit(-ctx.y(states[j], states[j + 1], events[j])) for j in range(k)]
        if not complete:
            parts.append(b.and_([b.lit(-ctx.y(states[k], i2, events[k])) for i2 in S]))
        parts.append(b.not_(w))
        ts.assert_true(b.or_(parts))
        if len(ts.clauses) + base > budget:
            projected = (len(ts.clauses) * terms) // (n + 1) + base
            raise BudgetExceeded(f"expansion needs about {projected} clauses, budget is {budget}")
    clauses += ts.clauses
    return clauses


def zip_product(states, events, k: int):
    """Yield ``(states 1..k, events 0..k)`` for all valid paths from state 1."""
    for rest in itertools.product(states, repeat=k):
        for evs in itertools.product(events, repeat=k + 1):
            yield rest, evs


# ---------------------------------------------------------------- explicit machines

def witness_exists(fsm: Fsm, alphabet, f: Formula, k: int,
                   mode: Completeness = Completeness.AT_LEAST_ONE) -> bool:
    """Whether some path of ``fsm`` with k+1 positions is a witness for NNF ``f``."""
    ctx = EncodingContext(alphabet, fsm.state_count, ScenarioTree(), mode, symmetry=False)
    units = []
    for i1 in ctx.states:
        for e in alphabet.events:
            step = fsm.step(i1, e)
            for i2 in ctx.states:
                units.append((ctx.y(i1, i2, e) if step and step[0] == i2 else -ctx.y(i1, i2, e),))
            for a in alphabet.actions:
                units.append((ctx.z(i1, a, e) if step and a in step[1] else -ctx.z(i1, a, e),))
    pieces = bmc_pieces(f, ctx, k)
    ts = Tseitin(ctx.pool.aux)
    ts.assert_true(And(pieces.path_validity(), pieces.witness))
    problem = CnfProblem(ctx.pool)
    problem.add_clauses(units + ts.clauses)
    return bool(problem.solve())
