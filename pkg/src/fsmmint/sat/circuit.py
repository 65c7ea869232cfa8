"""Boolean circuits over solver literals and their Tseitin transformation.

Nodes compare by identity so that large shared DAGs (BMC translations) stay
cheap to hash; use :func:`shape` for structural comparison.
"""
from __future__ import annotations

from typing import Callable, Iterable


class Circuit:
    __slots__ = ()


class Lit(Circuit):
    __slots__ = ("lit",)

    def __init__(self, lit: int):
        if lit == 0:
            raise ValueError("0 is not a literal")
        self.lit = lit

    def __repr__(self):
        return f"Lit({self.lit})"


class Const(Circuit):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


class Not(Circuit):
    __slots__ = ("arg",)

    def __init__(self, arg: Circuit):
        self.arg = arg

    def __repr__(self):
        return f"Not({self.arg!r})"


class And(Circuit):
    __slots__ = ("args",)

    def __init__(self, *args: Circuit):
        self.args = args

    def __repr__(self):
        return "And(" + ", ".join(map(repr, self.args)) + ")"


class Or(Circuit):
    __slots__ = ("args",)

    def __init__(self, *args: Circuit):
        self.args = args

    def __repr__(self):
        return "Or(" + ", ".join(map(repr, self.args)) + ")"


class Implies(Circuit):
    __slots__ = ("left", "right")

    def __init__(self, left: Circuit, right: Circuit):
        self.left, self.right = left, right

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


class Iff(Circuit):
    __slots__ = ("left", "right")

    def __init__(self, left: Circuit, right: Circuit):
        self.left, self.right = left, right

    def __repr__(self):
        return f"Iff({self.left!r}, {self.right!r})"


def lit(x: int) -> Lit:
    return Lit(x)


def neg(c: Circuit) -> Circuit:
    if isinstance(c, Lit):
        return Lit(-c.lit)
    if isinstance(c, Const):
        return FALSE if c.value else TRUE
    if isinstance(c, Not):
        return c.arg
    return Not(c)


def conj(args: Iterable[Circuit]) -> Circuit:
    args = tuple(args)
    return args[0] if len(args) == 1 else And(*args)


def disj(args: Iterable[Circuit]) -> Circuit:
    args = tuple(args)
    return args[0] if len(args) == 1 else Or(*args)


def shape(c: Circuit):
    """Hashable structural form; And/Or arguments become multisets."""
    if isinstance(c, Lit):
        return c.lit
    if isinstance(c, Const):
        return c.value
    if isinstance(c, Not):
        return ("not", shape(c.arg))
    if isinstance(c, (And, Or)):
        parts = sorted((shape(a) for a in c.args), key=repr)
        return ("and" if isinstance(c, And) else "or", tuple(parts))
    if isinstance(c, Implies):
        return ("implies", shape(c.left), shape(c.right))
    return ("iff", shape(c.left), shape(c.right))


def evaluate(c: Circuit, value: Callable[[int], bool]) -> bool:
    memo: dict[int, bool] = {}

    def ev(n):
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Lit):
            r = value(abs(n.lit))
            r = r if n.lit > 0 else not r
        elif isinstance(n, Const):
            r = n.value
        elif isinstance(n, Not):
            r = not ev(n.arg)
        elif isinstance(n, And):
            r = all(ev(a) for a in n.args)
        elif isinstance(n, Or):
            r = any(ev(a) for a in n.args)
        elif isinstance(n, Implies):
            r = (not ev(n.left)) or ev(n.right)
        else:
            r = ev(n.left) == ev(n.right)
        memo[key] = r
        return r

    return ev(c)


def substitute(c: Circuit, mapping: dict) -> Circuit:
    """Replace variables per ``mapping`` (var -> bool | int literal | Circuit), folding constants."""
    memo: dict[int, Circuit] = {}

    def sub(n):
        key = id(n)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(n, Lit):
            v = abs(n.lit)
            if v in mapping:
                r = mapping[v]
                if isinstance(r, bool):
                    r = TRUE if r else FALSE
                elif isinstance(r, int):
                    r = Lit(r)
                if n.lit < 0:
                    r = neg(r)
            else:
                r = n
        elif isinstance(n, Const):
            r = n
        elif isinstance(n, Not):
            r = neg(sub(n.arg))
        elif isinstance(n, (And, Or)):
            is_and = isinstance(n, And)
            kept = []
            r = None
            for a in n.args:
                s = sub(a)
                if isinstance(s, Const):
                    if s.value != is_and:
                        r = s  # absorbing element
                        break
                    continue
                kept.append(s)
            if r is None:
                if not kept:
                    r = TRUE if is_and else FALSE
                elif len(kept) == 1:
                    r = kept[0]
                else:
                    r = And(*kept) if is_and else Or(*kept)
        elif isinstance(n, Implies):
            r = sub(Or(Not(n.left), n.right))
        else:
            left, right = sub(n.left), sub(n.right)
            if isinstance(left, Const):
                r = right if left.value else neg(right)
            elif isinstance(right, Const):
                r = left if right.value else neg(left)
            else:
                r = Iff(left, right)
        memo[key] = r
        return r

    return sub(c)


class Tseitin:
    """Gate-by-gate definitional CNF; reuses gates across calls."""

    def __init__(self, new_var: Callable[[], int]):
        self.new_var = new_var
        self.clauses: list[tuple] = []
        self._memo: dict[int, object] = {}
        self._keep: list = []  # pins memoized nodes so ids stay unique

    def literal(self, c: Circuit):
        """Literal equivalent to ``c``, or a bool if ``c`` folds to a constant."""
        key = id(c)
        if key in self._memo:
            return self._memo[key]
        if isinstance(c, Lit):
            r = c.lit
        elif isinstance(c, Const):
            r = c.value
        elif isinstance(c, Not):
            a = self.literal(c.arg)
            r = (not a) if isinstance(a, bool) else -a
        elif isinstance(c, (And, Or)):
            r = self._gate(isinstance(c, And), [self.literal(a) for a in c.args])
        elif isinstance(c, Implies):
            a, b = self.literal(c.left), self.literal(c.right)
            r = self._gate(False, [(not a) if isinstance(a, bool) else -a, b])
        else:
            a, b = self.literal(c.left), self.literal(c.right)
            if isinstance(a, bool):
                r = b if a else (not b if isinstance(b, bool) else -b)
            elif isinstance(b, bool):
                r = a if b else -a
            elif a == b:
                r = True
            elif a == -b:
                r = False
            else:
                g = self.new_var()
                self.clauses += [(-g, -a, b), (-g, a, -b), (g, a, b), (g, -a, -b)]
                r = g
        self._memo[key] = r
        self._keep.append(c)
        return r

    def _gate(self, is_and: bool, lits: list):
        absorbing = not is_and
        args: list[int] = []
        seen: set[int] = set()
        for a in lits:
            if isinstance(a, bool):
                if a == absorbing:
                    return absorbing
                continue
            if -a in seen:
                return absorbing
            if a not in seen:
                seen.add(a)
                args.append(a)
        if not args:
            return not absorbing
        if len(args) == 1:
            return args[0]
        g = self.new_var()
        if is_and:
            self.clauses += [(-g, a) for a in args]
            self.clauses.append((g,) + tuple(-a for a in args))
        else:
            self.clauses += [(g, -a) for a in args]
            self.clauses.append((-g,) + tuple(args))
        return g

    def root(self, c: Circuit) -> int:
        """Literal for ``c``; constants get a fresh variable fixed by a unit clause."""
        r = self.literal(c)
        if isinstance(r, bool):
            g = self.new_var()
            self.clauses.append((g,) if r else (-g,))
            return g
        return r

    def assert_true(self, c: Circuit) -> None:
        """Add clauses forcing ``c``; top-level conjunctions/disjunctions need no root gate."""
        if isinstance(c, And):
            for a in c.args:
                self.assert_true(a)
            return
        if isinstance(c, Or):
            clause = []
            for a in c.args:
                r = self.literal(a)
                if r is True:
                    return
                if r is not False:
                    clause.append(r)
            self.clauses.append(tuple(dict.fromkeys(clause)))
            return
        r = self.literal(c)
        if r is True:
            return
        self.clauses.append(() if r is False else (r,))


def tseitin(c: Circuit, new_var: Callable[[], int]) -> tuple[list[tuple], int]:
    """Definitional clauses and the root literal of ``c``."""
    ts = Tseitin(new_var)
    root = ts.root(c)
    return ts.clauses, root
