"""Tests for Graph, permutations, random_regular and the edge-list format."""

from __future__ import annotations

from pathlib import Path

import networkx as nx
import pytest

from regraph.exceptions import (
    ContractViolation,
    GenerationFailure,
    GraphParseError,
    InfeasibleParameters,
)
from regraph.graph import (
    Graph,
    NodePermutation,
    apply_permutation,
    format_graph,
    iter_bits,
    make_rng,
    pad_graph,
    parse_graph,
    random_regular,
    read_graph,
    write_graph,
)


def test_iter_bits() -> None:
    assert list(iter_bits(0)) == []
    assert list(iter_bits(0b101001)) == [0, 3, 5]


def test_from_edges_builds_symmetric_rows(prism: Graph) -> None:
    assert prism.n == 6
    assert prism.edge_count == 9
    assert prism.has_edge(0, 3) and prism.has_edge(3, 0)
    assert not prism.has_edge(0, 4)
    assert prism.degrees == (3,) * 6
    assert prism.is_regular(3)
    assert list(prism.edges())[:3] == [(0, 1), (0, 2), (0, 3)]


def test_from_edges_rejects_bad_input() -> None:
    with pytest.raises(ContractViolation):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ContractViolation):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ContractViolation):
        Graph.from_edges(3, [(0, 1), (1, 0)])


def test_graph_rejects_asymmetric_rows() -> None:
    with pytest.raises(ContractViolation):
        Graph(2, (0b10, 0))


def test_adjacency_matrix_matches_edges(k33: Graph) -> None:
    matrix = k33.adjacency_matrix()
    assert matrix.shape == (6, 6)
    assert matrix.sum() == 2 * k33.edge_count
    assert (matrix == matrix.T).all()


def test_permutation_inverse_and_compose() -> None:
    p = NodePermutation((2, 0, 3, 1))
    assert p(0) == 2
    assert p.compose(p.inverse()) == NodePermutation.identity(4)
    assert p.inverse().compose(p) == NodePermutation.identity(4)


def test_permutation_rejects_non_bijection() -> None:
    with pytest.raises(ContractViolation):
        NodePermutation((0, 0, 1))


def test_apply_permutation_preserves_structure(prism: Graph) -> None:
    p = NodePermutation.random(6, seed=7)
    moved = apply_permutation(prism, p)
    assert moved.edge_count == prism.edge_count
    for i, j in prism.edges():
        assert moved.has_edge(p(i), p(j))
    assert apply_permutation(moved, p.inverse()) == prism


def test_apply_permutation_length_mismatch(prism: Graph) -> None:
    with pytest.raises(ContractViolation):
        apply_permutation(prism, NodePermutation.identity(5))


def test_pad_graph_adds_isolated_nodes(c4: Graph) -> None:
    padded = pad_graph(c4, 6)
    assert padded.n == 6
    assert padded.degrees == (2, 2, 2, 2, 0, 0)
    assert pad_graph(c4, 4) is c4
    with pytest.raises(ContractViolation):
        pad_graph(c4, 3)


@pytest.mark.parametrize(("n", "r"), [(10, 3), (12, 4), (20, 5), (50, 3)])
def test_random_regular_is_simple_and_regular(n: int, r: int) -> None:
    g = random_regular(n, r, seed=3)
    assert g.n == n
    assert g.is_regular(r)
    assert g.edge_count == n * r // 2
    assert nx.is_regular(nx.Graph(list(g.edges())))


def test_random_regular_is_deterministic() -> None:
    assert random_regular(30, 3, seed=11) == random_regular(30, 3, seed=11)
    assert random_regular(30, 3, seed=11) != random_regular(30, 3, seed=12)


def test_keyed_rng_streams_differ() -> None:
    a = make_rng(5, 3, 10, 0).integers(0, 1 << 30, size=4)
    b = make_rng(5, 3, 10, 1).integers(0, 1 << 30, size=4)
    assert a.tolist() != b.tolist()
    assert make_rng(5, 3, 10, 0).integers(0, 1 << 30, size=4).tolist() == a.tolist()


@pytest.mark.parametrize(("n", "r"), [(5, 3), (4, 4), (6, 1), (3, 0)])
def test_random_regular_infeasible(n: int, r: int) -> None:
    with pytest.raises(InfeasibleParameters):
        random_regular(n, r)


def test_random_regular_on_four_nodes_is_k4(k4: Graph) -> None:
    assert random_regular(4, 3, seed=0) == k4


def test_random_regular_budget_exhausted() -> None:
    # a random pairing of 80 stubs on 10 nodes is almost never simple
    with pytest.raises(GenerationFailure):
        random_regular(10, 8, seed=1, retry_budget=3)


def test_format_and_parse(prism: Graph) -> None:
    text = format_graph(prism)
    assert text.startswith("6\n0 1\n")
    assert text.endswith("\n")
    assert parse_graph(text) == prism


def test_parse_accepts_reversed_pairs_and_blank_lines() -> None:
    g = parse_graph("3\n1 0\n\n2 1\n")
    assert g == Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.mark.parametrize(
    ("text", "line"),
    [
        ("x\n", 1),
        ("3\n0 1\n0 3\n", 3),
        ("3\n0 0\n", 2),
        ("3\n0 1\n1 0\n", 3),
        ("3\n0 1 2\n", 2),
        ("3\n0 a\n", 2),
        ("+3\n0 1\n", 1),
        ("-1\n", 1),
        ("12\n1_0 2\n", 2),
        ("3\n+1 2\n", 2),
        ("3\n0 \u0661\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text: str, line: int) -> None:
    with pytest.raises(GraphParseError) as err:
        parse_graph(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_write_and_read(tmp_path: Path, k33: Graph) -> None:
    path = tmp_path / "k33.edges"
    write_graph(k33, path)
    assert b"\r" not in path.read_bytes()
    assert read_graph(path) == k33


def test_read_rejects_non_ascii_bytes(tmp_path: Path) -> None:
    path = tmp_path / "bad.edges"
    path.write_bytes(b"3\n0 1\n1 \xff2\n")
    with pytest.raises(GraphParseError) as err:
        read_graph(path)
    assert err.value.line == 3
