"""Text formats for scenarios, formulas and FSMs.

Scenario files hold one scenario per line, elements separated by ``;``::

    # comment
    e1(z1); e1(z1, z2); e2()
"""
from __future__ import annotations

import json
import re
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, Sequence

from .. import ltl
from ..core import Alphabet, Fsm

_ELEMENT = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*\(\s*([^()]*)\)\s*$")


class FormatError(ValueError):
    pass


def parse_scenarios(text: str) -> list[tuple]:
    scenarios = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        elements = []
        for chunk in line.split(";"):
            if not chunk.strip():
                continue
            m = _ELEMENT.match(chunk)
            if m is None:
                raise FormatError(f"line {lineno}: cannot read element {chunk.strip()!r}")
            outs = [a.strip() for a in m.group(2).split(",") if a.strip()]
            elements.append((m.group(1), frozenset(outs)))
        scenarios.append(tuple(elements))
    return scenarios


def read_scenarios(path) -> list[tuple]:
    return parse_scenarios(Path(path).read_text())


def format_scenarios(scenarios: Iterable[Sequence], alphabet: Alphabet | None = None) -> str:
    def out(o):
        return ", ".join(alphabet.sort_actions(o) if alphabet else sorted(o))

    return "".join("; ".join(f"{e}({out(o)})" for e, o in sc) + "\n" for sc in scenarios)


def format_formulas(formulas: Iterable[ltl.Formula]) -> str:
    return "".join(ltl.to_string(f) + "\n" for f in formulas)


def symbols(scenarios: Iterable[Sequence], formulas: Iterable[ltl.Formula] = ()) -> tuple[set, set]:
    """Event and action names used anywhere."""
    events, actions = set(), set()
    for sc in scenarios:
        for e, outs in sc:
            events.add(e)
            actions.update(outs)

    def atoms(f):
        if isinstance(f, ltl.WasEvent):
            events.add(f.name)
        elif isinstance(f, ltl.WasAction):
            actions.add(f.name)
        for c in ltl.children(f):
            atoms(c)

    for f in formulas:
        atoms(f)
    return events, actions


def infer_alphabet(scenarios: Iterable[Sequence], formulas: Iterable[ltl.Formula] = ()) -> Alphabet:
    """Alphabet of all symbols used, in natural order (e2 before e10)."""
    events, actions = symbols(scenarios, formulas)
    return Alphabet(tuple(sorted(events, key=natural_key)), tuple(sorted(actions, key=natural_key)))


def natural_key(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def _sorted_transitions(fsm: Fsm, alphabet: Alphabet | None):
    order = {e: i for i, e in enumerate(alphabet.events)} if alphabet else {}
    return sorted(fsm.transitions.items(),
                  key=lambda kv: (kv[0][0], order.get(kv[0][1], len(order)), natural_key(kv[0][1])))


def fsm_to_dot(fsm: Fsm, alphabet: Alphabet | None = None) -> str:
    lines = ["digraph fsm {", "  rankdir=LR;", '  init [shape=point];', "  init -> s1;"]
    for s in range(1, fsm.state_count + 1):
        lines.append(f"  s{s} [shape=circle, label=\"{s}\"];")
    for (s, e), (d, out) in _sorted_transitions(fsm, alphabet):
        outs = ",".join(alphabet.sort_actions(out) if alphabet else sorted(out))
        lines.append(f'  s{s} -> s{d} [label="{e} / {outs}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def fsm_to_json(fsm: Fsm, alphabet: Alphabet | None = None) -> str:
    data = {
        "stateCount": fsm.state_count,
        "initial": fsm.initial,
        "transitions": [
            {"src": s, "event": e, "dst": d,
             "outputs": list(alphabet.sort_actions(out) if alphabet else sorted(out))}
            for (s, e), (d, out) in _sorted_transitions(fsm, alphabet)
        ],
    }
    if alphabet is not None:
        data["events"] = list(alphabet.events)
        data["actions"] = list(alphabet.actions)
    return json.dumps(data, indent=2) + "\n"


def fsm_from_json(text: str) -> Fsm:
    try:
        data = json.loads(text)
        trans = {(t["src"], t["event"]): (t["dst"], frozenset(t["outputs"])) for t in data["transitions"]}
        return Fsm(data["stateCount"], trans, data.get("initial", 1))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad FSM JSON: {exc}") from exc


def write_instance(instance, directory) -> Path:
    """Scenarios, formulas, reference FSM and generation parameters in one directory."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    alphabet = instance.alphabet
    (out / "scenarios.txt").write_text(format_scenarios(instance.scenarios, alphabet))
    (out / "formulas.ltl").write_text(format_formulas(instance.formulas))
    (out / "reference.json").write_text(fsm_to_json(instance.reference, alphabet))
    (out / "reference.dot").write_text(fsm_to_dot(instance.reference, alphabet))
    meta = asdict(instance.spec) | {"hard": instance.hard}
    (out / "instance.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out
