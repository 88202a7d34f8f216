"""Shared graphs for the test suite (vertex 0 is always the sink)."""

import os
import sys

import pytest

# Ensure project root is on path when pytest is run from testing/
_project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _project_root not in sys.path:
    sys.path.insert(0, _project_root)

from chipfiring.model import asm_cover, cfm_cover
from chipfiring.multigraph import build_graph


def complete_graph(k):
    return build_graph(k, [(a, b) for a in range(k) for b in range(a + 1, k)])


@pytest.fixture
def k3():
    return build_graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def b3():
    return build_graph(2, [(0, 1), (0, 1), (0, 1)])


@pytest.fixture
def p3():
    return build_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def c5():
    return build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])


@pytest.fixture
def asm_k3(k3):
    return k3, asm_cover(k3)


@pytest.fixture
def cfm_k3(k3):
    return k3, cfm_cover(k3)
