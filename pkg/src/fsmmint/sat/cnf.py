"""Named variable pool and an incrementally solvable clause store."""
from __future__ import annotations

from typing import Iterable, Sequence

from .solver import Solver


class UnquantifiedVariable(ValueError):
    pass


class VarPool:
    """Bijection between structured names such as ``("x", 3, 1)`` and ids 1, 2, ..."""

    def __init__(self):
        self._ids: dict = {}
        self._names: list = [None]

    def __call__(self, *name) -> int:
        vid = self._ids.get(name)
        if vid is None:
            vid = len(self._names)
            self._ids[name] = vid
            self._names.append(name)
        return vid

    def get(self, *name) -> int | None:
        return self._ids.get(name)

    def aux(self) -> int:
        vid = len(self._names)
        name = ("aux", vid)
        self._ids[name] = vid
        self._names.append(name)
        return vid

    def name(self, vid: int) -> tuple:
        return self._names[abs(vid)]

    def kind(self, vid: int) -> str:
        return self._names[abs(vid)][0]

    @property
    def top(self) -> int:
        return len(self._names) - 1

    def __contains__(self, name) -> bool:
        return name in self._ids

    def items(self):
        return self._ids.items()

    def label(self, lit: int) -> str:
        name = self._names[abs(lit)]
        text = "_".join(str(p) for p in name)
        return text if lit > 0 else "-" + text


class CnfProblem:
    """Clause store bound to an embedded incremental solver.

    Clauses are only ever added; each call to :meth:`solve` forwards the
    clauses added since the previous call, so learnt clauses survive.
    """

    def __init__(self, pool: VarPool | None = None, solver_factory=Solver):
        self.pool = pool if pool is not None else VarPool()
        self.clauses: list[tuple] = []
        self._solver = None
        self._solver_factory = solver_factory
        self._sent = 0
        self.model: list | None = None

    def add_clause(self, clause: Iterable[int]) -> None:
        self.clauses.append(tuple(clause))

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> "CnfProblem":
        for c in clauses:
            self.clauses.append(tuple(c))
        return self

    @property
    def num_vars(self) -> int:
        top = self.pool.top
        for c in self.clauses:
            for lit in c:
                if abs(lit) > top:
                    top = abs(lit)
        return top

    def solve(self, deadline: float | None = None) -> bool | None:
        """True/False for SAT/UNSAT, None if ``deadline`` (time.monotonic) passed."""
        if self._solver is None:
            self._solver = self._solver_factory()
        solver = self._solver
        fresh = self.clauses[self._sent:]
        solver.ensure_vars(max([self.pool.top] + [abs(l) for c in fresh for l in c]))
        for c in fresh:
            solver.add_clause(c)
        self._sent = len(self.clauses)
        status = solver.solve(deadline)
        if status:
            model = solver.model()
            # variables mentioned in no clause default to false
            self.model = list(model) + [False] * (self.pool.top + 1 - len(model))
        else:
            self.model = None
        return status

    def value(self, lit: int) -> bool:
        if self.model is None:
            raise RuntimeError("no model available")
        v = abs(lit)
        val = self.model[v] if v < len(self.model) else False
        return val if lit > 0 else not val

    @property
    def solver_stats(self) -> dict:
        s = self._solver
        if s is None:
            return {}
        return {"conflicts": s.conflicts, "decisions": s.decisions, "propagations": s.propagations}

    def to_dimacs(self) -> str:
        return to_dimacs(self.clauses, self.num_vars)

    def dump(self) -> str:
        """Clause database with symbolic variable names, one clause per line."""
        return "".join(" ".join(self.pool.label(l) for l in c) + "\n" for c in self.clauses)


def to_dimacs(clauses: Sequence[Sequence[int]], num_vars: int | None = None) -> str:
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" if c else "0" for c in clauses]
    return "\n".join(lines) + "\n"


def to_qdimacs(clauses: Sequence[Sequence[int]], blocks: Sequence[tuple[str, Sequence[int]]],
               num_vars: int | None = None) -> str:
    """``blocks`` is an outermost-first list of ``("e"|"a", variables)``."""
    used = {abs(l) for c in clauses for l in c}
    if num_vars is None:
        num_vars = max(used, default=0)
    listed: set[int] = set()
    for q, vs in blocks:
        if q not in ("e", "a"):
            raise ValueError(f"bad quantifier {q!r}")
        for v in vs:
            if v in listed:
                raise ValueError(f"variable {v} quantified twice")
            listed.add(v)
    missing = sorted(used - listed)
    if missing:
        raise UnquantifiedVariable(f"variables without quantifier: {missing[:10]}")
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [f"{q} " + " ".join(map(str, vs)) + " 0" for q, vs in blocks if vs]
    lines += [" ".join(map(str, c)) + " 0" if c else "0" for c in clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[tuple], list[tuple[str, list[int]]]]:
    """Return ``(num_vars, clauses, quantifier_blocks)``; blocks empty for plain DIMACS."""
    num_vars = 0
    clauses: list[tuple] = []
    blocks: list[tuple[str, list[int]]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            num_vars = int(parts[2])
            continue
        if line[0] in "ea" and not line[0].isdigit():
            nums = [int(t) for t in line[1:].split()]
            blocks.append((line[0], [v for v in nums if v != 0]))
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    return num_vars, clauses, blocks
