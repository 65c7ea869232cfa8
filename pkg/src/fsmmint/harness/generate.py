"""Random instance generation: reference FSMs, scenarios, discriminating LTL formulas."""
from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .. import ltl
from ..core import Alphabet, Fsm, accepts
from ..encode import Completeness
from ..ltl import (Finally, Globally, Implies, Next, Not, Or, Until, WasAction, WasEvent)
from ..synth import Method, SynthesisRequest, identify_iterative
from ..verifier import model_check


class GenerationStuck(RuntimeError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    max_states: int
    events: int = 4
    actions: int = 4
    complete: bool = False
    scenario_count: int = 10
    total_length: int | None = None    # defaults to 50 * max_states
    formula_count: int = 4
    seed: int = 0

    @classmethod
    def standard(cls, states: int, seed: int = 0, complete: bool = False) -> "InstanceSpec":
        return cls(states, 4, 4, complete, 10, None, 4, seed)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet.numbered(self.events, self.actions)

    @property
    def length(self) -> int:
        return 50 * self.max_states if self.total_length is None else self.total_length

    @property
    def mode(self) -> Completeness:
        return Completeness.COMPLETE if self.complete else Completeness.AT_LEAST_ONE


@dataclass(frozen=True)
class Instance:
    spec: InstanceSpec
    reference: Fsm
    scenarios: tuple
    formulas: tuple
    hard: bool = False

    @property
    def alphabet(self) -> Alphabet:
        return self.spec.alphabet


def _random_outputs(alphabet: Alphabet, rng: random.Random) -> frozenset:
    size = rng.randint(0, min(4, len(alphabet.actions)))
    return frozenset(rng.sample(alphabet.actions, size))


def random_fsm_raw(spec: InstanceSpec, rng: random.Random) -> tuple[Fsm, float]:
    """Random FSM and its transition density before any repair."""
    alphabet = spec.alphabet
    n = spec.max_states
    slots = [(s, e) for s in range(1, n + 1) for e in alphabet.events]
    if spec.complete:
        for _ in range(1000):
            trans = {slot: (rng.randint(1, n), _random_outputs(alphabet, rng)) for slot in slots}
            fsm = Fsm(n, trans)
            if len(fsm.reachable()) == n:
                return fsm, 1.0
        raise GenerationStuck("no complete FSM with all states reachable")
    trans = {slot: (rng.randint(1, n), _random_outputs(alphabet, rng))
             for slot in slots if rng.random() < 0.5}
    density = len(trans) / len(slots)
    return _repair(Fsm(n, trans), alphabet, rng), density


def _repair(fsm: Fsm, alphabet: Alphabet, rng: random.Random) -> Fsm:
    """Add transitions until all states are reachable and none is a dead end."""
    n = fsm.state_count
    trans = dict(fsm.transitions)
    for _ in range(10_000):
        current = Fsm(n, trans)
        reach = current.reachable()
        missing = sorted(set(range(1, n + 1)) - reach)
        if not missing:
            break
        target = missing[0]
        free = [(s, e) for s in sorted(reach) for e in alphabet.events if (s, e) not in trans]
        if free:
            slot = rng.choice(free)
        else:
            # every reachable slot is taken: redirect one whose destination has another way in
            slot = rng.choice([(s, e) for s in sorted(reach) for e in alphabet.events])
        trans[slot] = (target, _random_outputs(alphabet, rng))
    else:
        raise GenerationStuck("could not make every state reachable")
    for s in range(1, n + 1):
        if not any((s, e) in trans for e in alphabet.events):
            e = rng.choice(alphabet.events)
            trans[(s, e)] = (rng.randint(1, n), _random_outputs(alphabet, rng))
    return Fsm(n, trans)


def random_fsm(spec: InstanceSpec, rng: random.Random) -> Fsm:
    return random_fsm_raw(spec, rng)[0]


def random_scenarios(fsm: Fsm, spec: InstanceSpec, rng: random.Random, retries: int = 100) -> tuple:
    """Random walks from the initial state; in complete mode half the transitions are banned."""
    count = spec.scenario_count
    total = spec.length
    lengths = [total // count] * count
    lengths[-1] += total - sum(lengths)
    slots = sorted(fsm.transitions, key=lambda se: (se[0], str(se[1])))
    for _attempt in range(retries):
        allowed = set(slots)
        if spec.complete:
            allowed = set(rng.sample(slots, len(slots) - len(slots) // 2))
        scenarios = []
        for length in lengths:
            for _walk in range(retries):
                walk = _walk_once(fsm, allowed, length, rng)
                if walk is not None:
                    scenarios.append(walk)
                    break
            else:
                break
        else:
            return tuple(scenarios)
    raise GenerationStuck("random walks keep running into banned transitions")


def _walk_once(fsm: Fsm, allowed: set, length: int, rng: random.Random):
    state = fsm.initial
    walk = []
    for _ in range(length):
        options = sorted(((s, e) for (s, e) in allowed if s == state), key=lambda se: str(se[1]))
        if not options:
            return None
        slot = rng.choice(options)
        dest, out = fsm.transitions[slot]
        walk.append((slot[1], out))
        state = dest
    return tuple(walk)


def _successor_events(fsm: Fsm, event) -> list:
    dests = {d for (s, e), (d, _o) in fsm.transitions.items() if e == event}
    return sorted({e for (s, e) in fsm.transitions if s in dests}, key=str)


def _outputs_on(fsm: Fsm, event, after=None) -> list[frozenset]:
    """Output sets of ``event`` transitions, optionally only those following an ``after`` transition."""
    if after is None:
        sources = None
    else:
        sources = {d for (s, e), (d, _o) in fsm.transitions.items() if e == after}
    return [out for (s, e), (_d, out) in fsm.transitions.items()
            if e == event and (sources is None or s in sources)]


def candidate_formula(fsm: Fsm, alphabet: Alphabet, rng: random.Random) -> ltl.Formula | None:
    """One instantiation of a randomly chosen property template."""
    e, e2 = (WasEvent(rng.choice(alphabet.events)) for _ in range(2))
    kind = rng.randrange(10)
    if not alphabet.actions:
        kind = 5
    else:
        z, z2 = (WasAction(rng.choice(alphabet.actions)) for _ in range(2))
    if kind == 0:
        return Globally(Implies(e, Finally(z)))
    if kind == 1:
        return Globally(Implies(z, Next(z2)))
    if kind == 2:
        return Finally(z)
    if kind == 3:
        return Globally(Not(ltl.And(e, z)))
    if kind == 4:
        return Or(z, Next(z2))
    if kind == 5:
        succ = _successor_events(fsm, e.name)
        if not succ:
            return None
        disj = WasEvent(succ[0])
        for name in succ[1:]:
            disj = Or(disj, WasEvent(name))
        return Globally(Implies(e, Next(disj)))
    if kind in (6, 7):
        # tailored to what the reference does on one event, possibly in one context
        after = e2.name if kind == 7 else None
        outs = _outputs_on(fsm, e.name, after)
        if not outs:
            return None
        always = frozenset.intersection(*outs)
        never = set(alphabet.actions) - frozenset.union(*outs)
        options = [WasAction(a) for a in sorted(always)] + [Not(WasAction(a)) for a in sorted(never)]
        if not options:
            return None
        body = Implies(e, rng.choice(options))
        return Globally(Implies(e2, Next(body))) if after else Globally(body)
    if kind == 8:
        return Globally(Finally(z))
    return Until(Not(e), z)


def random_ltl(fsm: Fsm, spec: InstanceSpec, rng: random.Random, retries: int = 1000) -> tuple:
    """Formulas true on ``fsm`` but on at most 5 of 10 fresh random FSMs."""
    alphabet = spec.alphabet
    chosen: list = []
    for _ in range(retries):
        if len(chosen) == spec.formula_count:
            return tuple(chosen)
        f = candidate_formula(fsm, alphabet, rng)
        if f is None or f in chosen:
            continue
        if model_check(fsm, [f])[0] is not None:
            continue
        others = [random_fsm(spec, rng) for _ in range(10)]
        satisfied = sum(model_check(o, [f])[0] is None for o in others)
        if satisfied <= 5:
            chosen.append(f)
    if len(chosen) == spec.formula_count:
        return tuple(chosen)
    raise GenerationStuck(f"only {len(chosen)} of {spec.formula_count} formulas found")


def generate_instance(spec: InstanceSpec, rng: random.Random | None = None) -> Instance:
    rng = rng or random.Random(spec.seed)
    fsm = random_fsm(spec, rng)
    scenarios = random_scenarios(fsm, spec, rng)
    formulas = random_ltl(fsm, spec, rng) if spec.formula_count else ()
    return Instance(spec, fsm, scenarios, formulas)


def scenarios_only_fsm(instance: Instance) -> Fsm | None:
    """First FSM the iterative method proposes at |S|max, before any counterexample."""
    spec = instance.spec
    req = SynthesisRequest(spec.alphabet, instance.scenarios, (), spec.max_states, spec.mode,
                           Method.ITERATIVE)
    return identify_iterative(req).fsm


def make_hard_instance(spec: InstanceSpec, retries: int = 100) -> Instance:
    """Regenerate until the scenarios alone admit an FSM violating some formula."""
    rng = random.Random(spec.seed)
    for _ in range(retries):
        try:
            inst = generate_instance(spec, rng)
        except GenerationStuck:
            continue
        fsm = scenarios_only_fsm(inst)
        if fsm is not None and any(c is not None for c in model_check(fsm, inst.formulas)):
            return replace(inst, hard=True)
    raise GenerationStuck(f"no hard instance within {retries} attempts")


def check_instance(instance: Instance) -> bool:
    """Reference FSM reproduces every scenario and satisfies every formula."""
    ref = instance.reference
    return (all(accepts(ref, sc) for sc in instance.scenarios)
            and all(c is None for c in model_check(ref, instance.formulas)))
