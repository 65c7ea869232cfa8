# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled CDCL core; same interface and search strategy as ``_cdcl_py``.

Clauses live in one flat literal arena.  Literal ``l`` of variable ``v`` is
``2*v`` (positive) or ``2*v+1`` (negative).
"""
from libcpp.vector cimport vector
from libc.math cimport pow

import time

cdef int UNDEF = -1


cdef double luby(double y, int x):
    cdef int size = 1, seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return pow(y, seq)


cdef class Solver:
    cdef public int nvars
    cdef public bint ok
    cdef public long conflicts, decisions, propagations
    cdef vector[int] arena
    cdef vector[int] cstart, csize, clbd
    cdef vector[char] clearnt, cdeleted
    cdef vector[double] cact
    cdef vector[vector[int]] watches
    cdef vector[signed char] val
    cdef vector[int] level, reason
    cdef vector[double] activity
    cdef vector[char] phase, seen
    cdef vector[int] trail, trail_lim
    cdef int qhead
    cdef vector[int] heap, heap_idx
    cdef double var_inc, cla_inc, max_learnts
    cdef long n_learnts
    cdef list _model

    backend = "compiled"

    def __cinit__(self):
        self.nvars = 0
        self.ok = True
        self.conflicts = self.decisions = self.propagations = 0
        self.watches.resize(2)
        self.val.resize(2, 0)
        self.level.push_back(0)
        self.reason.push_back(UNDEF)
        self.activity.push_back(0.0)
        self.phase.push_back(1)
        self.seen.push_back(0)
        self.heap_idx.push_back(-1)
        self.qhead = 0
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.max_learnts = 20000.0
        self.n_learnts = 0
        self._model = []

    # ------------------------------------------------------------ heap

    cdef inline bint _less(self, int a, int b):
        return self.activity[a] > self.activity[b]

    cdef void _heap_up(self, int i):
        cdef int v = self.heap[i]
        cdef int p
        while i > 0:
            p = (i - 1) >> 1
            if not self._less(v, self.heap[p]):
                break
            self.heap[i] = self.heap[p]
            self.heap_idx[self.heap[i]] = i
            i = p
        self.heap[i] = v
        self.heap_idx[v] = i

    cdef void _heap_down(self, int i):
        cdef int v = self.heap[i]
        cdef int n = self.heap.size()
        cdef int c
        while 2 * i + 1 < n:
            c = 2 * i + 1
            if c + 1 < n and self._less(self.heap[c + 1], self.heap[c]):
                c += 1
            if not self._less(self.heap[c], v):
                break
            self.heap[i] = self.heap[c]
            self.heap_idx[self.heap[i]] = i
            i = c
        self.heap[i] = v
        self.heap_idx[v] = i

    cdef void _heap_insert(self, int v):
        if self.heap_idx[v] >= 0:
            return
        self.heap.push_back(v)
        self.heap_idx[v] = self.heap.size() - 1
        self._heap_up(self.heap.size() - 1)

    cdef int _heap_pop(self):
        cdef int top = self.heap[0]
        cdef int last = self.heap.back()
        self.heap.pop_back()
        self.heap_idx[top] = -1
        if self.heap.size() > 0:
            self.heap[0] = last
            self.heap_idx[last] = 0
            self._heap_down(0)
        return top

    # ------------------------------------------------------------ variables

    def ensure_vars(self, int n):
        while self.nvars < n:
            self.nvars += 1
            self.watches.resize(2 * self.nvars + 2)
            self.val.push_back(0)
            self.val.push_back(0)
            self.level.push_back(0)
            self.reason.push_back(UNDEF)
            self.activity.push_back(0.0)
            self.phase.push_back(1)
            self.seen.push_back(0)
            self.heap_idx.push_back(-1)
            self._heap_insert(self.nvars)

    def new_var(self):
        self.ensure_vars(self.nvars + 1)
        return self.nvars

    # ------------------------------------------------------------ clauses

    def add_clause(self, lits):
        cdef int x, v, l
        if not self.ok:
            return False
        if self.trail_lim.size() > 0:
            self._cancel_until(0)
        ilits = set()
        for x in lits:
            v = x if x > 0 else -x
            if v == 0:
                raise ValueError("0 is not a literal")
            if v > self.nvars:
                self.ensure_vars(v)
            ilits.add(2 * v + (1 if x < 0 else 0))
        cdef vector[int] out
        for l in sorted(ilits):
            if (l ^ 1) in ilits or self.val[l] == 1:
                return True
            if self.val[l] == 0:
                out.push_back(l)
        if out.size() == 0:
            self.ok = False
            return False
        if out.size() == 1:
            self._enqueue(out[0], UNDEF)
            if self._propagate() != UNDEF:
                self.ok = False
                return False
            return True
        self._attach(out, False, 0)
        return True

    cdef int _attach(self, vector[int]& lits, bint learnt, int lbd):
        cdef int cid = self.cstart.size()
        self.cstart.push_back(self.arena.size())
        self.csize.push_back(lits.size())
        for l in lits:
            self.arena.push_back(l)
        self.clearnt.push_back(learnt)
        self.cdeleted.push_back(0)
        self.cact.push_back(0.0)
        self.clbd.push_back(lbd)
        self.watches[lits[0]].push_back(cid)
        self.watches[lits[1]].push_back(cid)
        if learnt:
            self.n_learnts += 1
        return cid

    # ------------------------------------------------------------ trail

    cdef inline void _enqueue(self, int lit, int reason):
        cdef int v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = self.trail_lim.size()
        self.reason[v] = reason
        self.trail.push_back(lit)

    cdef void _cancel_until(self, int lvl):
        cdef int stop, i, lit, v
        if <int>self.trail_lim.size() <= lvl:
            return
        stop = self.trail_lim[lvl]
        i = self.trail.size() - 1
        while i >= stop:
            lit = self.trail[i]
            v = lit >> 1
            self.val[lit] = 0
            self.val[lit ^ 1] = 0
            self.reason[v] = UNDEF
            self.phase[v] = lit & 1
            self._heap_insert(v)
            i -= 1
        self.trail.resize(stop)
        self.trail_lim.resize(lvl)
        self.qhead = stop

    cdef int _propagate(self):
        cdef int p, false_lit, cid, first, k, lk, n, i, j, base, sz, v
        cdef int dl = self.trail_lim.size()
        cdef int confl = UNDEF
        cdef vector[int]* ws
        cdef int* c
        while self.qhead < <int>self.trail.size():
            p = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = &self.watches[false_lit]
            n = ws.size()
            i = 0
            j = 0
            while i < n:
                cid = ws[0][i]
                i += 1
                if self.cdeleted[cid]:
                    continue
                base = self.cstart[cid]
                sz = self.csize[cid]
                c = &self.arena[base]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if self.val[first] == 1:
                    ws[0][j] = cid
                    j += 1
                    continue
                found = False
                for k in range(2, sz):
                    lk = c[k]
                    if self.val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        self.watches[lk].push_back(cid)
                        # push_back may reallocate another list only; ws is a different vector
                        found = True
                        break
                if found:
                    continue
                ws[0][j] = cid
                j += 1
                if self.val[first] == -1:
                    confl = cid
                    while i < n:
                        ws[0][j] = ws[0][i]
                        j += 1
                        i += 1
                else:
                    v = first >> 1
                    self.val[first] = 1
                    self.val[first ^ 1] = -1
                    self.level[v] = dl
                    self.reason[v] = cid
                    self.trail.push_back(first)
            ws.resize(j)
            if confl != UNDEF:
                self.qhead = self.trail.size()
                return confl
        return UNDEF

    # ------------------------------------------------------------ learning

    cdef void _bump_var(self, int v):
        cdef int u
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        if self.heap_idx[v] >= 0:
            self._heap_up(self.heap_idx[v])

    cdef void _bump_clause(self, int cid):
        cdef int k
        self.cact[cid] += self.cla_inc
        if self.cact[cid] > 1e20:
            for k in range(<int>self.cact.size()):
                self.cact[k] *= 1e-20
            self.cla_inc *= 1e-20

    cdef int _analyze(self, int confl, vector[int]& learnt, int* lbd_out):
        cdef int dl = self.trail_lim.size()
        cdef int path = 0
        cdef int p = UNDEF
        cdef int idx = self.trail.size() - 1
        cdef int q, v, k, base, sz, start, r, vx, mi, bt
        cdef bint keep_it
        learnt.clear()
        learnt.push_back(0)
        while True:
            if self.clearnt[confl]:
                self._bump_clause(confl)
            base = self.cstart[confl]
            sz = self.csize[confl]
            start = 0 if p == UNDEF else 1
            for k in range(start, sz):
                q = self.arena[base + k]
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self.seen[v] = 1
                    self._bump_var(v)
                    if self.level[v] >= dl:
                        path += 1
                    else:
                        learnt.push_back(q)
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            self.seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        cdef vector[int] keep
        keep.push_back(learnt[0])
        for k in range(1, learnt.size()):
            q = learnt[k]
            r = self.reason[q >> 1]
            if r == UNDEF:
                keep.push_back(q)
                continue
            base = self.cstart[r]
            sz = self.csize[r]
            for start in range(1, sz):
                vx = self.arena[base + start] >> 1
                if not self.seen[vx] and self.level[vx] > 0:
                    keep.push_back(q)
                    break
        for k in range(learnt.size()):
            self.seen[learnt[k] >> 1] = 0
        learnt.swap(keep)
        if learnt.size() == 1:
            bt = 0
        else:
            mi = 1
            for k in range(2, learnt.size()):
                if self.level[learnt[k] >> 1] > self.level[learnt[mi] >> 1]:
                    mi = k
            q = learnt[1]
            learnt[1] = learnt[mi]
            learnt[mi] = q
            bt = self.level[learnt[1] >> 1]
        levels = set()
        for k in range(learnt.size()):
            levels.add(self.level[learnt[k] >> 1])
        lbd_out[0] = len(levels)
        return bt

    def _reduce_db(self):
        cdef int cid, k
        locked = set()
        for k in range(self.trail.size()):
            cid = self.reason[self.trail[k] >> 1]
            if cid != UNDEF:
                locked.add(cid)
        cands = [cid for cid in range(self.cstart.size())
                 if not self.cdeleted[cid] and self.clearnt[cid] and cid not in locked and self.clbd[cid] > 2]
        cands.sort(key=lambda c: (-self.clbd[c], self.cact[c]))
        for cid in cands[: len(cands) // 2]:
            self.cdeleted[cid] = 1
            self.n_learnts -= 1

    # ------------------------------------------------------------ search

    cdef int _pick_branch(self):
        cdef int v
        while self.heap.size() > 0:
            v = self._heap_pop()
            if self.val[2 * v] == 0:
                return 2 * v + self.phase[v]
        return UNDEF

    cdef int _search(self, int budget, object deadline):
        """1 SAT, 0 UNSAT, 2 restart, 3 timeout."""
        cdef int conflicts_here = 0
        cdef int confl, bt, lbd, cid, lit
        cdef vector[int] learnt
        while True:
            confl = self._propagate()
            if confl != UNDEF:
                self.conflicts += 1
                conflicts_here += 1
                if self.trail_lim.size() == 0:
                    return 0
                bt = self._analyze(confl, learnt, &lbd)
                self._cancel_until(bt)
                if learnt.size() == 1:
                    self._enqueue(learnt[0], UNDEF)
                else:
                    cid = self._attach(learnt, True, lbd)
                    self._bump_clause(cid)
                    self._enqueue(learnt[0], cid)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                if deadline is not None and self.conflicts % 256 == 0 and time.monotonic() > deadline:
                    return 3
            else:
                if conflicts_here >= budget:
                    self._cancel_until(0)
                    return 2
                if self.n_learnts - <long>self.trail.size() >= self.max_learnts:
                    self._reduce_db()
                    self.max_learnts *= 1.1
                lit = self._pick_branch()
                if lit == UNDEF:
                    return 1
                self.decisions += 1
                self.trail_lim.push_back(self.trail.size())
                self._enqueue(lit, UNDEF)

    def solve(self, deadline=None):
        """True (SAT), False (UNSAT) or None when ``deadline`` (monotonic) passed."""
        cdef int status, restarts = 0, v
        self._model = []
        if not self.ok:
            return False
        self.max_learnts = max(self.max_learnts, self.cstart.size() / 3.0)
        while True:
            status = self._search(<int>(luby(2, restarts) * 100), deadline)
            restarts += 1
            if status == 2:
                if deadline is not None and time.monotonic() > deadline:
                    return None
                continue
            if status == 3:
                self._cancel_until(0)
                return None
            if status == 1:
                self._model = [False] + [self.val[2 * v] == 1 for v in range(1, self.nvars + 1)]
            else:
                self.ok = False
            self._cancel_until(0)
            return status == 1

    def model(self):
        """Values indexed by variable (index 0 unused) from the last SAT answer."""
        return self._model
