import random

import pytest

from folpipe.pipeline.prompts import PROOFWRITER_EXEMPLAR, PROOFWRITER_FOL, PROOFWRITER_OUTPUT

LOOP_TEXT = "Predicates:\n" + " ".join(["IsFavorite(x, y)"] * 400)

ARITY_BLOCK = """Predicates:
HaveLongVacation()
HaveLongVacation(x)
Employee(x)
Premises:
∀x (Employee(x) → HaveLongVacation(x))
Employee(james)
Conclusion:
HaveLongVacation()
"""


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def exemplar_block():
    return PROOFWRITER_OUTPUT


@pytest.fixture
def exemplar_fol():
    return PROOFWRITER_FOL


@pytest.fixture
def exemplar_problem():
    return PROOFWRITER_EXEMPLAR


@pytest.fixture
def loop_text():
    return LOOP_TEXT


@pytest.fixture
def arity_block():
    return ARITY_BLOCK


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
