"""Pure-Python CDCL solver core (fallback for the compiled ``_cdcl`` extension).

Literals are DIMACS integers at the interface.  Internally literal ``l`` of
variable ``v`` is ``2*v`` (positive) or ``2*v+1`` (negative).
"""
from __future__ import annotations

import heapq
import time

_UNDEF = -1


def _luby(y: float, x: int) -> float:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


class Solver:
    """Incremental CDCL: two watched literals, 1UIP learning, VSIDS, Luby restarts."""

    backend = "python"

    def __init__(self):
        self.nvars = 0
        self.ok = True
        self.clauses: list = []        # literal lists; None once deleted
        self.learnt: list = []         # parallel flags
        self.cla_act: list = []
        self.lbd: list = []
        self.watches: list = [[], []]  # per literal, clause ids watching it
        self.val: list = [0, 0]        # per literal: 1 true, -1 false, 0 unassigned
        self.level: list = [0]
        self.reason: list = [_UNDEF]
        self.activity: list = [0.0]
        self.phase: list = [1]         # saved polarity bit (1 = negative)
        self.seen: list = [0]
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.heap: list = []
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.n_learnts = 0
        self.max_learnts = 20000.0
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self._model: list = []

    # ------------------------------------------------------------ variables

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            self.watches += [[], []]
            self.val += [0, 0]
            self.level.append(0)
            self.reason.append(_UNDEF)
            self.activity.append(0.0)
            self.phase.append(1)
            self.seen.append(0)
            heapq.heappush(self.heap, (0.0, self.nvars))

    def new_var(self) -> int:
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    # ------------------------------------------------------------ clauses

    def add_clause(self, lits) -> bool:
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        ilits = set()
        for x in lits:
            v = x if x > 0 else -x
            if v == 0:
                raise ValueError("0 is not a literal")
            if v > self.nvars:
                self.ensure_vars(v)
            ilits.add(2 * v + (x < 0))
        out = []
        val = self.val
        for l in sorted(ilits):
            if l ^ 1 in ilits or val[l] == 1:
                return True  # tautology or satisfied at level 0
            if val[l] == 0:
                out.append(l)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], _UNDEF)
            if self._propagate() != _UNDEF:
                self.ok = False
                return False
            return True
        self._attach(out, learnt=False)
        return True

    def _attach(self, lits: list, learnt: bool, lbd: int = 0) -> int:
        cid = len(self.clauses)
        self.clauses.append(lits)
        self.learnt.append(learnt)
        self.cla_act.append(0.0)
        self.lbd.append(lbd)
        self.watches[lits[0]].append(cid)
        self.watches[lits[1]].append(cid)
        if learnt:
            self.n_learnts += 1
        return cid

    # ------------------------------------------------------------ trail

    def _enqueue(self, lit: int, reason: int) -> None:
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        val, phase, activity, heap, reason = self.val, self.phase, self.activity, self.heap, self.reason
        trail = self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            reason[v] = _UNDEF
            phase[v] = lit & 1
            heapq.heappush(heap, (-activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = stop

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause id or -1."""
        val, watches, clauses, trail = self.val, self.watches, self.clauses, self.trail
        level, reason = self.level, self.reason
        dl = len(self.trail_lim)
        confl = _UNDEF
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                cid = ws[i]
                i += 1
                c = clauses[cid]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = cid
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(cid)
                        break
                else:
                    ws[j] = cid
                    j += 1
                    if val[first] == -1:
                        confl = cid
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        v = first >> 1
                        val[first] = 1
                        val[first ^ 1] = -1
                        level[v] = dl
                        reason[v] = cid
                        trail.append(first)
            del ws[j:]
            if confl != _UNDEF:
                self.qhead = len(trail)
                return confl
        return _UNDEF

    # ------------------------------------------------------------ learning

    def _bump_var(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, cid: int) -> None:
        self.cla_act[cid] += self.cla_inc
        if self.cla_act[cid] > 1e20:
            self.cla_act = [a * 1e-20 for a in self.cla_act]
            self.cla_inc *= 1e-20

    def _analyze(self, confl: int):
        seen, level, reason, clauses, trail = self.seen, self.level, self.reason, self.clauses, self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = _UNDEF
        idx = len(trail) - 1
        while True:
            c = clauses[confl]
            if self.learnt[confl]:
                self._bump_clause(confl)
            for q in (c if p == _UNDEF else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    self._bump_var(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # local minimization: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r == _UNDEF:
                keep.append(q)
                continue
            for x in clauses[r][1:]:
                vx = x >> 1
                if not seen[vx] and level[vx] > 0:
                    keep.append(q)
                    break
        for q in learnt:
            seen[q >> 1] = 0
        learnt = keep
        if len(learnt) == 1:
            bt = 0
        else:
            mi = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[mi] >> 1]:
                    mi = k
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _reduce_db(self) -> None:
        locked = set()
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r != _UNDEF:
                locked.add(r)
        cands = [cid for cid, c in enumerate(self.clauses)
                 if c is not None and self.learnt[cid] and cid not in locked and self.lbd[cid] > 2]
        cands.sort(key=lambda cid: (-self.lbd[cid], self.cla_act[cid]))
        for cid in cands[: len(cands) // 2]:
            self.clauses[cid] = None
            self.n_learnts -= 1
        # watch lists drop deleted ids lazily during propagation

    # ------------------------------------------------------------ search

    def _pick_branch(self) -> int:
        heap, val, activity = self.heap, self.val, self.activity
        while heap:
            neg_act, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -neg_act == activity[v]:
                return 2 * v + self.phase[v]
        return _UNDEF

    def _search(self, budget: int, deadline):
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl != _UNDEF:
                self.conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    return False
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], _UNDEF)
                else:
                    cid = self._attach(learnt, learnt=True, lbd=lbd)
                    self._bump_clause(cid)
                    self._enqueue(learnt[0], cid)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                if deadline is not None and self.conflicts % 256 == 0 and time.monotonic() > deadline:
                    return None
            else:
                if conflicts_here >= budget:
                    self._cancel_until(0)
                    return "restart"
                if self.n_learnts - len(self.trail) >= self.max_learnts:
                    self._reduce_db()
                    self.max_learnts *= 1.1
                lit = self._pick_branch()
                if lit == _UNDEF:
                    return True
                self.decisions += 1
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, _UNDEF)

    def solve(self, deadline: float | None = None) -> bool | None:
        """True (SAT), False (UNSAT) or None when ``deadline`` (monotonic) passed."""
        self._model = []
        if not self.ok:
            return False
        self.max_learnts = max(self.max_learnts, len(self.clauses) / 3.0)
        restarts = 0
        while True:
            status = self._search(int(_luby(2, restarts) * 100), deadline)
            restarts += 1
            if len(self.heap) > 4 * self.nvars + 1024:
                act, val = self.activity, self.val
                self.heap = [(-act[v], v) for v in range(1, self.nvars + 1) if val[2 * v] == 0]
                heapq.heapify(self.heap)
            if status == "restart":
                if deadline is not None and time.monotonic() > deadline:
                    return None
                continue
            if status is True:
                self._model = [False] + [self.val[2 * v] == 1 for v in range(1, self.nvars + 1)]
            elif status is False:
                self.ok = False
            self._cancel_until(0)
            return status

    def model(self) -> list:
        """Values indexed by variable (index 0 unused) from the last SAT answer."""
        return self._model
