"""Simple undirected graphs over 0-based node indices.

A :class:`Graph` stores one adjacency bit-row per node (row ``i`` has bit
``j`` set iff ``{i, j}`` is an edge). Rows are Python ints, so any node count
works and rows can be combined with ordinary bit operations. Derived
neighbor lists and sets are cached on first use for the hot loops of the
counting and refinement code.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .const import DEFAULT_RETRY_BUDGET, MIN_DEGREE, PAIRINGS_PER_ATTEMPT
from .exceptions import (
    ContractViolation,
    GenerationFailure,
    GraphParseError,
    InfeasibleParameters,
)

_LOGGER = logging.getLogger(__name__)

Edge = tuple[int, int]
SeedLike = int | Sequence[int] | np.random.Generator | None


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def make_rng(seed: SeedLike = None, *keys: int) -> np.random.Generator:
    """Return a numpy Generator for ``seed``, optionally split by ``keys``.

    ``make_rng(seed, a, b)`` gives a stream independent of ``make_rng(seed, a, c)``,
    which is how per-graph streams are derived from a dataset seed.
    """
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ContractViolation("cannot derive keyed streams from a Generator")
        return seed
    if seed is None:
        return np.random.default_rng()
    entropy = [seed] if isinstance(seed, int) else list(seed)
    return np.random.default_rng([*entropy, *keys])


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph."""

    n: int
    rows: tuple[int, ...]
    edge_count: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ContractViolation(f"node count must be non-negative, got {self.n}")
        if len(self.rows) != self.n:
            raise ContractViolation(
                f"expected {self.n} adjacency rows, got {len(self.rows)}"
            )
        full = (1 << self.n) - 1
        bits = 0
        for i, row in enumerate(self.rows):
            if row < 0 or row & ~full:
                raise ContractViolation(f"row {i} references nodes outside 0..{self.n - 1}")
            if (row >> i) & 1:
                raise ContractViolation(f"self-loop at node {i}")
            for j in iter_bits(row):
                if not (self.rows[j] >> i) & 1:
                    raise ContractViolation(f"adjacency is not symmetric at ({i}, {j})")
            bits += row.bit_count()
        object.__setattr__(self, "edge_count", bits // 2)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> Graph:
        rows = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ContractViolation(f"edge ({i}, {j}) out of range for {n} nodes")
            if i == j:
                raise ContractViolation(f"self-loop at node {i}")
            if (rows[i] >> j) & 1:
                raise ContractViolation(f"duplicate edge ({i}, {j})")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    # -- queries --------------------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    def edges(self) -> Iterator[Edge]:
        """Edges as ``(i, j)`` with ``i < j``, in lexicographic order."""
        for i, row in enumerate(self.rows):
            for j in iter_bits(row >> (i + 1)):
                yield i, i + 1 + j

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(iter_bits(row)) for row in self.rows)

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.neighbors)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(row.bit_count() for row in self.rows)

    def degree_sequence(self) -> list[int]:
        return sorted(self.degrees)

    def is_regular(self, r: int | None = None) -> bool:
        if not self.n:
            return True
        target = self.degrees[0] if r is None else r
        return all(d == target for d in self.degrees)

    def adjacency_matrix(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=bool)
        for i, nbrs in enumerate(self.neighbors):
            matrix[i, list(nbrs)] = True
        return matrix

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class NodePermutation:
    """Bijection on ``0..n-1``; node ``i`` is sent to ``sigma[i]``."""

    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ContractViolation("sigma is not a bijection on 0..n-1")

    @classmethod
    def identity(cls, n: int) -> NodePermutation:
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, seed: SeedLike = None) -> NodePermutation:
        rng = make_rng(seed)
        return cls(tuple(int(x) for x in rng.permutation(n)))

    def __len__(self) -> int:
        return len(self.sigma)

    def __call__(self, i: int) -> int:
        return self.sigma[i]

    def inverse(self) -> NodePermutation:
        inv = [0] * len(self.sigma)
        for i, s in enumerate(self.sigma):
            inv[s] = i
        return NodePermutation(tuple(inv))

    def compose(self, other: NodePermutation) -> NodePermutation:
        """``self ∘ other``: apply ``other`` first."""
        if len(other) != len(self):
            raise ContractViolation("cannot compose permutations of different length")
        return NodePermutation(tuple(self.sigma[s] for s in other.sigma))


def apply_permutation(g: Graph, p: NodePermutation) -> Graph:
    """Relabel ``g`` so that edge ``{i, j}`` becomes ``{p(i), p(j)}``."""
    if len(p) != g.n:
        raise ContractViolation(
            f"permutation has length {len(p)}, graph has {g.n} nodes"
        )
    sigma = p.sigma
    rows = [0] * g.n
    for i, nbrs in enumerate(g.neighbors):
        row = 0
        for j in nbrs:
            row |= 1 << sigma[j]
        rows[sigma[i]] = row
    return Graph(g.n, tuple(rows))


def pad_graph(g: Graph, n: int) -> Graph:
    """Append isolated nodes until ``g`` has ``n`` nodes."""
    if n < g.n:
        raise ContractViolation(f"cannot pad a {g.n}-node graph down to {n} nodes")
    if n == g.n:
        return g
    return Graph(n, g.rows + (0,) * (n - g.n))


def check_regular_parameters(n: int, r: int) -> None:
    if r < MIN_DEGREE:
        raise InfeasibleParameters(f"degree must be at least {MIN_DEGREE}, got r={r}")
    if r >= n:
        raise InfeasibleParameters(f"degree r={r} must be smaller than n={n}")
    if (n * r) % 2:
        raise InfeasibleParameters(f"n*r must be even, got n={n}, r={r}")


def random_regular(
    n: int,
    r: int,
    seed: SeedLike = None,
    *,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
) -> Graph:
    """Sample a simple r-regular graph with the pairing (configuration) model.

    Every attempt shuffles ``PAIRINGS_PER_ATTEMPT`` independent copies of the
    ``n*r`` stubs, pairs each copy off and keeps the first pairing without a
    loop or a repeated edge. Pairings are rejected whole, so accepted graphs
    are uniform over simple r-regular graphs on ``n`` labeled nodes.
    """
    check_regular_parameters(n, r)
    rng = make_rng(seed)
    stubs = np.tile(np.repeat(np.arange(n, dtype=np.int64), r), (PAIRINGS_PER_ATTEMPT, 1))
    for attempt in range(1, retry_budget + 1):
        pairs = rng.permuted(stubs, axis=1).reshape(PAIRINGS_PER_ATTEMPT, -1, 2)
        lo = pairs.min(axis=2)
        hi = pairs.max(axis=2)
        keys = np.sort(lo * n + hi, axis=1)
        simple = ~np.any(lo == hi, axis=1) & ~np.any(keys[:, 1:] == keys[:, :-1], axis=1)
        if not simple.any():
            continue
        row = int(np.argmax(simple))
        _LOGGER.debug("random_regular(n=%d, r=%d) accepted attempt %d", n, r, attempt)
        return Graph.from_edges(n, zip(lo[row].tolist(), hi[row].tolist()))
    raise GenerationFailure(
        f"no simple {r}-regular graph on {n} nodes after {retry_budget} attempts"
    )


# -- edge-list files ----------------------------------------------------------


def format_graph(g: Graph) -> str:
    return f"{g.n}\n" + "".join(f"{i} {j}\n" for i, j in g.edges())


def _is_plain_int(token: str) -> bool:
    # ASCII digits only: no sign, no underscores, no other scripts
    return token.isascii() and token.isdigit()


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: a line ``N`` then one ``i j`` line per edge."""
    lines = text.split("\n")
    header = lines[0].strip()
    if not _is_plain_int(header):
        raise GraphParseError(f"expected node count, got {header!r}", 1)
    n = int(header)

    rows = [0] * n
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"expected 'i j', got {raw.strip()!r}", lineno)
        if not all(_is_plain_int(tok) for tok in tokens):
            raise GraphParseError(f"non-integer node index in {raw.strip()!r}", lineno)
        i, j = int(tokens[0]), int(tokens[1])
        if not (0 <= i < n and 0 <= j < n):
            raise GraphParseError(f"node index out of range 0..{n - 1}: {i} {j}", lineno)
        if i == j:
            raise GraphParseError(f"self-loop at node {i}", lineno)
        if (rows[i] >> j) & 1:
            raise GraphParseError(f"duplicate edge {min(i, j)} {max(i, j)}", lineno)
        rows[i] |= 1 << j
        rows[j] |= 1 << i
    return Graph(n, tuple(rows))


def read_graph(path: str | Path) -> Graph:
    data = Path(path).read_bytes()
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as err:
        line = data.count(b"\n", 0, err.start) + 1
        raise GraphParseError(f"non-ASCII byte 0x{data[err.start]:02x}", line) from None
    return parse_graph(text)


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_bytes(format_graph(g).encode("ascii"))
