import sys
from pathlib import Path

import pytest

from fsmmint.core import Alphabet, Counterexample, Fsm, element
from fsmmint.ltl import parse_ltl

TESTS = Path(__file__).parent
QBF_SOLVER = f"{sys.executable} {TESTS / 'qbf_expand_solver.py'} -"
QBF_SOLVER_NO_MODEL = QBF_SOLVER + " --no-model"

AB = Alphabet(("e1", "e2"), ("z1", "z2"))

SAMPLE_SCENARIOS = [
    [element("e1", "z1"), element("e1", "z1"), element("e1", "z1")],
    [element("e1", "z1"), element("e1", "z1"), element("e2", "z1")],
    [element("e1", "z1"), element("e2", "z1")],
    [element("e2", "z1"), element("e2", "z2"), element("e1", "z1")],
]

SAMPLE_COUNTEREXAMPLES = [
    Counterexample((element("e1", "z1"),), (element("e1", "z1"), element("e1", "z2"))),
    Counterexample((element("e2", "z1"), element("e2", "z2")), (element("e1", "z2"),)),
    Counterexample((element("e1", "z1"), element("e2", "z2"), element("e2", "z2"))),
]

RESPONSE_TEXT = "G(wasAction(z2) -> X wasAction(z1))"

# two-state machine that reproduces the sample scenarios and satisfies the formula
SAMPLE_FSM = Fsm(2, {
    (1, "e1"): (1, {"z1"}),
    (1, "e2"): (2, {"z1"}),
    (2, "e2"): (1, {"z2"}),
})


@pytest.fixture
def ab():
    return AB


@pytest.fixture
def samples():
    return [tuple(sc) for sc in SAMPLE_SCENARIOS]


@pytest.fixture
def response_formula():
    return parse_ltl(RESPONSE_TEXT, AB)


@pytest.fixture
def sample_fsm():
    return SAMPLE_FSM


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
