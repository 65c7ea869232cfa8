"""LTL over ``wasEvent``/``wasAction`` atoms: syntax, parsing, negation normal form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Alphabet, UnknownSymbol


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class WasEvent(Formula):
    name: str


@dataclass(frozen=True)
class WasAction(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


ATOMS = (WasEvent, WasAction)
UNARY = {Not: "!", Next: "X", Globally: "G", Finally: "F"}
BINARY = {And: "&&", Or: "||", Implies: "->", Until: "U", Release: "R"}


def conjoin(formulas: Iterable[Formula]) -> Formula:
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def is_literal(f: Formula) -> bool:
    return isinstance(f, (Const, WasEvent, WasAction)) or (
        isinstance(f, Not) and isinstance(f.arg, ATOMS))


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Next, Globally, Finally)):
        return (f.arg,)
    if isinstance(f, tuple(BINARY)):
        return (f.left, f.right)
    return ()


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


# ---------------------------------------------------------------- printing

def to_string(f: Formula) -> str:
    """Render in the parser's concrete syntax."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, WasEvent):
        return f"wasEvent({f.name})"
    if isinstance(f, WasAction):
        return f"wasAction({f.name})"
    if isinstance(f, tuple(UNARY)):
        return f"{UNARY[type(f)]}({to_string(f.arg)})"
    op = BINARY[type(f)]
    left = to_string(f.left)
    if isinstance(f.left, tuple(UNARY)):
        left = f"({left})"  # "!a U b" would parse as "!(a U b)"
    return f"({left} {op} {to_string(f.right)})"


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(->|\|\||&&|[!()])|([A-Za-z_][A-Za-z0-9_.]*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            ws = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + ws]!r}", pos + ws)
        tok = m.group(1) or m.group(2)
        start = m.start(1) if m.group(1) else m.start(2)
        if len(tok) > 1 and set(tok) <= set("XGF"):
            tokens.extend((ch, start + k) for k, ch in enumerate(tok))
        else:
            tokens.append((tok, start))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, expected: str | None = None) -> str:
        tok, pos = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "<eof>":
            tok, pos = self.tokens[self.i]
            raise ParseError(f"unexpected {tok!r}", pos)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "||":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        ops = {"!": Not, "X": Next, "G": Globally, "F": Finally}
        if tok in ops:
            self.take()
            return ops[tok](self.unary())
        return self.binary()

    def binary(self) -> Formula:
        left = self.primary()
        tok = self.peek()
        if tok in ("U", "R"):
            self.take()
            right = self.unary()
            return Until(left, right) if tok == "U" else Release(left, right)
        return left

    def primary(self) -> Formula:
        tok, pos = self.tokens[self.i]
        if tok == "(":
            self.take()
            f = self.implication()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok in ("wasEvent", "wasAction"):
            self.take()
            self.take("(")
            name, npos = self.tokens[self.i]
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", name):
                raise ParseError(f"expected identifier, found {name!r}", npos)
            self.take()
            self.take(")")
            if self.alphabet is not None:
                pool = self.alphabet.events if tok == "wasEvent" else self.alphabet.actions
                if name not in pool:
                    raise UnknownSymbol(f"{tok}({name}) not in alphabet")
            return WasEvent(name) if tok == "wasEvent" else WasAction(name)
        raise ParseError(f"unexpected {tok!r}", pos)


def parse_ltl(text: str, alphabet: Alphabet | None = None) -> Formula:
    return _Parser(text, alphabet).parse()


def read_ltl_file(path, alphabet: Alphabet | None = None) -> list[Formula]:
    formulas = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                formulas.append(parse_ltl(line, alphabet))
    return formulas


# ---------------------------------------------------------------- NNF

def to_nnf(f: Formula) -> Formula:
    """Push negations onto atoms and eliminate implications."""
    return _nnf(f, False)


def negate(f: Formula) -> Formula:
    return _nnf(f, True)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Const):
        return Const(f.value != neg)
    if isinstance(f, ATOMS):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, Implies):
        left, right = _nnf(f.left, not neg), _nnf(f.right, neg)
        return And(left, right) if neg else Or(left, right)
    if isinstance(f, And):
        left, right = _nnf(f.left, neg), _nnf(f.right, neg)
        return Or(left, right) if neg else And(left, right)
    if isinstance(f, Or):
        left, right = _nnf(f.left, neg), _nnf(f.right, neg)
        return And(left, right) if neg else Or(left, right)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg))
    if isinstance(f, Globally):
        return (Finally if neg else Globally)(_nnf(f.arg, neg))
    if isinstance(f, Finally):
        return (Globally if neg else Finally)(_nnf(f.arg, neg))
    if isinstance(f, Until):
        left, right = _nnf(f.left, neg), _nnf(f.right, neg)
        return Release(left, right) if neg else Until(left, right)
    if isinstance(f, Release):
        left, right = _nnf(f.left, neg), _nnf(f.right, neg)
        return Until(left, right) if neg else Release(left, right)
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    if isinstance(f, Implies):
        return False
    if isinstance(f, Not):
        return isinstance(f.arg, ATOMS)
    return all(is_nnf(c) for c in children(f))


# ---------------------------------------------------------------- semantics

def holds_on_lasso(f: Formula, prefix: Sequence[frozenset], cycle: Sequence[frozenset]) -> bool:
    """Evaluate ``f`` at position 0 of the word ``prefix (cycle)^ω``.

    Letters are label sets as produced by :func:`fsmmint.core.atom_label`.
    """
    if not cycle:
        raise ValueError("cycle must be non-empty")
    letters = list(prefix) + list(cycle)
    n = len(letters)
    succ = [i + 1 for i in range(n - 1)] + [len(prefix)]
    memo: dict = {}

    def ev(g: Formula) -> list[bool]:
        if g in memo:
            return memo[g]
        if isinstance(g, Const):
            val = [g.value] * n
        elif isinstance(g, WasEvent):
            val = [("wasEvent", g.name) in letter for letter in letters]
        elif isinstance(g, WasAction):
            val = [("wasAction", g.name) in letter for letter in letters]
        elif isinstance(g, Not):
            val = [not x for x in ev(g.arg)]
        elif isinstance(g, And):
            a, b = ev(g.left), ev(g.right)
            val = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = ev(g.left), ev(g.right)
            val = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Implies):
            a, b = ev(g.left), ev(g.right)
            val = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = ev(g.arg)
            val = [a[succ[i]] for i in range(n)]
        elif isinstance(g, (Finally, Until)):
            # least fixpoint of  right or (left and X self)
            a = ev(g.left) if isinstance(g, Until) else [True] * n
            b = ev(g.right) if isinstance(g, Until) else ev(g.arg)
            val = [False] * n
            for _ in range(n + 1):
                val = [b[i] or (a[i] and val[succ[i]]) for i in range(n)]
        elif isinstance(g, (Globally, Release)):
            # greatest fixpoint of  right and (left or X self)
            a = ev(g.left) if isinstance(g, Release) else [False] * n
            b = ev(g.right) if isinstance(g, Release) else ev(g.arg)
            val = [True] * n
            for _ in range(n + 1):
                val = [b[i] and (a[i] or val[succ[i]]) for i in range(n)]
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = val
        return val

    return ev(f)[0]
