import numpy as np
import pytest

from holoshear.fatgraph import SHIPPED_GRAPHS, FatGraph, shipped_graph
from holoshear.ralgebra import Lambda

LAMBDAS = (Lambda.MINUS, Lambda.ZERO, Lambda.PLUS)


@pytest.fixture(params=SHIPPED_GRAPHS)
def graph(request):
    return shipped_graph(request.param)


@pytest.fixture
def torus():
    return shipped_graph("punctured_torus")


@pytest.fixture
def k4():
    return shipped_graph("four_punctured_sphere")


@pytest.fixture
def genus2():
    return shipped_graph("genus2_one_puncture")


@pytest.fixture
def dumbbell():
    # thrice-punctured sphere with two loops a, c joined by b
    return FatGraph([[0, 1], [2, 3], [4, 5]], [[0, 1, 2], [3, 4, 5]], ["a", "b", "c"])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance lines collected by test_acceptance.py, printed once at the end
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
