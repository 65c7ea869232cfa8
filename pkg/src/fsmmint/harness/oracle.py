"""Exhaustive reference answer for tiny instances.

Enumerates FSMs transition slot by slot and prunes as soon as some scenario
disagrees with the slots fixed so far.  Nothing here touches the SAT layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterator, Sequence

from ..core import Alphabet, Fsm
from ..encode import Completeness
from ..verifier import model_check


@dataclass(frozen=True)
class NoSolutionUpTo:
    cap: int


def _subsets(actions: Sequence) -> list[frozenset]:
    return [frozenset(c) for c in chain.from_iterable(combinations(actions, r)
                                                       for r in range(len(actions) + 1))]


def _consistent(trans: dict, scenarios) -> bool:
    """No scenario contradicts the slots fixed so far (unfixed slots stop the run)."""
    for sc in scenarios:
        state = 1
        for event, out in sc:
            step = trans.get((state, event))
            if step is None:
                break
            dest, got = step
            if got != out:
                return False
            state = dest
    return True


def _fully_accepted(trans: dict, scenarios) -> bool:
    for sc in scenarios:
        state = 1
        for event, out in sc:
            step = trans.get((state, event))
            if step is None or step[1] != out:
                return False
            state = step[0]
    return True


def enumerate_fsms(alphabet: Alphabet, n: int, scenarios, mode: Completeness) -> Iterator[Fsm]:
    """All n-state FSMs that accept every scenario and meet the completeness mode."""
    slots = [(s, e) for s in range(1, n + 1) for e in alphabet.events]
    outs = _subsets(alphabet.actions)
    choices = [(d, o) for d in range(1, n + 1) for o in outs]
    optional = mode is not Completeness.COMPLETE
    scenarios = [tuple(sc) for sc in scenarios]
    trans: dict = {}

    def rec(i):
        if i == len(slots):
            if optional and any(not any((s, e) in trans for e in alphabet.events)
                                for s in range(1, n + 1)):
                return
            if _fully_accepted(trans, scenarios):
                yield Fsm(n, dict(trans))
            return
        slot = slots[i]
        if optional:
            yield from rec(i + 1)
        for choice in choices:
            trans[slot] = choice
            if _consistent(trans, scenarios):
                yield from rec(i + 1)
            del trans[slot]

    yield from rec(0)


def brute_force_min_states(alphabet: Alphabet, scenarios, formulas, mode: Completeness,
                           max_states: int = 3) -> int | NoSolutionUpTo:
    """Smallest state count admitting an FSM consistent with scenarios and formulas."""
    for n in range(1, max_states + 1):
        for fsm in enumerate_fsms(alphabet, n, scenarios, mode):
            if all(c is None for c in model_check(fsm, formulas)):
                return n
    return NoSolutionUpTo(max_states)
