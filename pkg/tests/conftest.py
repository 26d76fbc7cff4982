"""Shared pytest fixtures for regraph unit tests."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

# Project root on path so regraph can be imported without installing
ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from regraph.graph import Graph, NodePermutation, apply_permutation  # noqa: E402
from regraph.patterns import make_cycle  # noqa: E402


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def k4() -> Graph:
    return complete_graph(4)


@pytest.fixture
def c4() -> Graph:
    return cycle_graph(4)


@pytest.fixture
def k33() -> Graph:
    """Complete bipartite K_{3,3}: sides {0, 1, 2} and {3, 4, 5}."""
    return Graph.from_edges(6, [(i, j) for i in range(3) for j in range(3, 6)])


@pytest.fixture
def prism() -> Graph:
    """Triangular prism: triangles 0-1-2 and 3-4-5 joined by i -- i+3."""
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return Graph.from_edges(6, edges)


@pytest.fixture
def prism_relabeled(prism: Graph) -> Graph:
    return apply_permutation(prism, NodePermutation((4, 2, 0, 5, 1, 3)))


@pytest.fixture
def c8() -> Graph:
    return cycle_graph(8)


@pytest.fixture
def two_c4() -> Graph:
    """Two disjoint 4-cycles on 8 nodes."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)]
    return Graph.from_edges(8, edges)


@pytest.fixture
def c4_free_host() -> Graph:
    """Square with one diagonal: contains a 4-cycle, but not an induced one."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])


@pytest.fixture
def one_c4_host() -> Graph:
    """A 4-cycle 0-1-2-3 with a pendant triangle 3-4-5; exactly one induced 4-cycle."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (3, 5)]
    return Graph.from_edges(6, edges)


@pytest.fixture
def square_pattern():
    return make_cycle(4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
