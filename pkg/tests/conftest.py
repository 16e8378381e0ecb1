import random
import sys
from fractions import Fraction

import pytest

from purecircuit.textio import parse_pc

F = Fraction


def pc(text: str):
    return parse_pc("pure-circuit v1\n" + text)


# Feedback through PURIFY and a single NOT.
EX1 = "gate PURIFY u -> v w\ngate NOT v -> u\n"
# NOR feeding a PURIFY that feeds it back.
EX2 = "gate NOR v w -> u\ngate PURIFY u -> v w\n"


@pytest.fixture
def ex1():
    return pc(EX1)


@pytest.fixture
def ex2():
    return pc(EX2)


@pytest.fixture
def rng():
    return random.Random(0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
