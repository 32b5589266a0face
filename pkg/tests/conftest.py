from fractions import Fraction

import pytest
from hypothesis import settings

from markovhull.measures import PathMeasure
from markovhull.paths import PathSpace

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction


@pytest.fixture
def space23():
    return PathSpace.simple(2, 3)


@pytest.fixture
def eta(space23):
    """Half on (0,0,0), half on (1,0,1)."""
    return PathMeasure(space23, {(0, 0, 0): F(1, 2), (1, 0, 1): F(1, 2)})


@pytest.fixture
def eta_markov(space23):
    return PathMeasure(space23, {p: F(1, 4) for p in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1)]})


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
