"""Template subgraphs used as operator patterns.

Patterns are small connected simple graphs. Each carries the exact order
of its automorphism group, which relates strict-embedding counts to
occurrence counts (raw = occurrences * aut_order).
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

from pydantic import BaseModel, Field, TypeAdapter, field_validator

from .const import CYCLE_STAR_SPECS, MAX_BRUTE_FORCE_K
from .exceptions import CapabilityError, ContractViolation
from .graph import Edge, Graph, iter_bits

_LOGGER = logging.getLogger(__name__)

FAMILIES = ("cycle", "star", "complete", "path", "rigid", "cycle_star", "custom")


@dataclass(frozen=True)
class Pattern:
    """A connected template graph with its automorphism-group order."""

    k: int
    edges: tuple[Edge, ...]
    aut_order: int
    family: str
    label: str

    @cached_property
    def graph(self) -> Graph:
        return Graph.from_edges(self.k, self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Pattern({self.label!r}, k={self.k}, aut={self.aut_order})"


@dataclass(frozen=True)
class NormalizationConstant:
    """Normalization of a pattern in an N-node host.

    ``value`` is the number of injective maps of the k pattern nodes into the
    N host nodes, N!/(N-k)!; ``n_count`` is the number of labeled copies of the
    pattern in the complete graph on N nodes.
    """

    value: int
    n_count: int
    aut_order: int
    host_n: int


def _normalize_edges(k: int, edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    seen: set[Edge] = set()
    for edge in edges:
        if len(edge) != 2:
            raise ContractViolation(f"edge {tuple(edge)} must have two endpoints")
        i, j = int(edge[0]), int(edge[1])
        if i == j:
            raise ContractViolation(f"self-loop at pattern node {i}")
        if not (0 <= i < k and 0 <= j < k):
            raise ContractViolation(f"edge ({i}, {j}) out of range for k={k}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ContractViolation(f"duplicate edge {key}")
        seen.add(key)
    return tuple(sorted(seen))


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        for v in iter_bits(frontier):
            reach |= g.rows[v]
        frontier = reach & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


def _has_extension(g: Graph, fixed: list[tuple[int, int]]) -> bool:
    """True if some automorphism of ``g`` agrees with the partial map ``fixed``."""
    k = g.n
    image = [-1] * k
    used = [False] * k
    for v, u in fixed:
        if image[v] != -1 or used[u]:
            return False
        image[v] = u
        used[u] = True
    for a, (v, u) in enumerate(fixed):
        if g.degrees[v] != g.degrees[u]:
            return False
        for w, x in fixed[:a]:
            if g.has_edge(v, w) != g.has_edge(u, x):
                return False

    order = [v for v in range(k) if image[v] == -1]
    placed = [v for v in range(k) if image[v] != -1]

    def extend(t: int) -> bool:
        if t == len(order):
            return True
        v = order[t]
        for u in range(k):
            if used[u] or g.degrees[u] != g.degrees[v]:
                continue
            if any(g.has_edge(v, w) != g.has_edge(u, image[w]) for w in placed):
                continue
            image[v] = u
            used[u] = True
            placed.append(v)
            if extend(t + 1):
                return True
            placed.pop()
            used[u] = False
            image[v] = -1
        return False

    return extend(0)


def compute_aut_order(g: Graph) -> int:
    """Exact number of node permutations of ``g`` that preserve its edge set.

    Walks the pointwise stabilizer chain of nodes ``0, 1, ...``: the group
    order is the product of the orbit sizes of node ``i`` under the
    permutations fixing nodes ``0..i-1``, and each orbit is found by
    exhaustive backtracking search for a witness automorphism.
    """
    if g.n > MAX_BRUTE_FORCE_K:
        raise CapabilityError(
            f"automorphism search is limited to k <= {MAX_BRUTE_FORCE_K} "
            f"(got k={g.n}); supply aut_order explicitly"
        )
    order = 1
    base: list[tuple[int, int]] = []
    for v in range(g.n):
        orbit = sum(1 for u in range(g.n) if _has_extension(g, [*base, (v, u)]))
        order *= orbit
        base.append((v, v))
    return order


def make_pattern(
    k: int,
    edges: Iterable[Sequence[int]],
    label: str,
    *,
    family: str = "custom",
    aut_order: int | None = None,
) -> Pattern:
    if family not in FAMILIES:
        raise ContractViolation(f"unknown pattern family {family!r}")
    if k < 2:
        raise ContractViolation(f"pattern needs at least 2 nodes, got k={k}")
    norm = _normalize_edges(k, edges)
    if not norm:
        raise ContractViolation("pattern needs at least one edge")
    graph = Graph.from_edges(k, norm)
    if not is_connected(graph):
        raise ContractViolation(f"pattern {label!r} is not connected")
    if aut_order is None:
        aut_order = compute_aut_order(graph)
    elif aut_order < 1 or math.factorial(k) % aut_order:
        raise ContractViolation(f"aut_order {aut_order} does not divide {k}!")
    pattern = Pattern(k=k, edges=norm, aut_order=aut_order, family=family, label=label)
    _LOGGER.debug("Built pattern %s", pattern)
    return pattern


def make_cycle(k: int) -> Pattern:
    if k < 3:
        raise ContractViolation(f"cycle needs k >= 3, got {k}")
    return make_pattern(k, [(i, (i + 1) % k) for i in range(k)], f"C{k}", family="cycle")


def make_star(k: int) -> Pattern:
    """Star on ``k`` nodes: center 0 and ``k - 1`` leaves."""
    if k < 3:
        raise ContractViolation(f"star needs k >= 3, got {k}")
    return make_pattern(k, [(0, i) for i in range(1, k)], f"S{k}", family="star")


def make_path(k: int) -> Pattern:
    if k < 2:
        raise ContractViolation(f"path needs k >= 2, got {k}")
    return make_pattern(k, [(i, i + 1) for i in range(k - 1)], f"P{k}", family="path")


def make_complete(k: int) -> Pattern:
    if k < 3:
        raise ContractViolation(f"complete pattern needs k >= 3, got {k}")
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return make_pattern(k, edges, f"K{k}", family="complete")


def make_cycle_star(m: int, pendant_spec: Sequence[int]) -> Pattern:
    """Cycle on ``m`` nodes with ``pendant_spec[i]`` leaves hung on cycle node ``i``."""
    if m < 3:
        raise ContractViolation(f"cycle length must be >= 3, got {m}")
    if len(pendant_spec) != m:
        raise ContractViolation(f"pendant spec needs {m} entries, got {len(pendant_spec)}")
    if any(x < 0 for x in pendant_spec) or not any(pendant_spec):
        raise ContractViolation("pendant spec needs non-negative entries, at least one positive")
    edges = [(i, (i + 1) % m) for i in range(m)]
    nxt = m
    for node, leaves in enumerate(pendant_spec):
        for _ in range(leaves):
            edges.append((node, nxt))
            nxt += 1
    label = f"C{m}+" + "".join(str(x) for x in pendant_spec)
    return make_pattern(nxt, edges, label, family="cycle_star")


def make_custom(
    k: int,
    edges: Iterable[Sequence[int]],
    label: str,
    *,
    rigid: bool = False,
) -> Pattern:
    """User-supplied pattern; with ``rigid=True`` it must have no non-trivial automorphism."""
    pattern = make_pattern(k, edges, label, family="rigid" if rigid else "custom")
    if rigid and pattern.aut_order != 1:
        raise ContractViolation(
            f"pattern {label!r} has {pattern.aut_order} automorphisms, not rigid"
        )
    return pattern


def normalization(p: Pattern, n: int) -> NormalizationConstant:
    if n < p.k:
        raise ContractViolation(f"host size {n} is smaller than pattern size {p.k}")
    value = math.perm(n, p.k)
    return NormalizationConstant(
        value=value, n_count=value // p.aut_order, aut_order=p.aut_order, host_n=n
    )


# Smallest asymmetric connected graphs on 6 and 7 nodes.
RIGID_PATTERNS: list[tuple[int, list[Edge], str]] = [
    (6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (0, 3)], "R6"),
    (7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)], "R7"),
]


@lru_cache(maxsize=8)
def _roster(cycle_star_specs: tuple[tuple[int, ...], ...]) -> tuple[Pattern, ...]:
    roster: list[Pattern] = []
    roster.extend(make_cycle(k) for k in range(3, 11))
    roster.extend(make_star(k) for k in range(4, 8))
    roster.extend(make_complete(k) for k in range(4, 10))
    roster.extend(make_path(k) for k in range(3, 10))
    roster.extend(make_custom(k, edges, label, rigid=True) for k, edges, label in RIGID_PATTERNS)
    roster.extend(make_cycle_star(len(spec), spec) for spec in cycle_star_specs)
    _LOGGER.info("Default roster ready: %d patterns", len(roster))
    return tuple(roster)


def default_roster(cycle_star_specs: Sequence[Sequence[int]] | None = None) -> list[Pattern]:
    """Built-in roster, in this order.

    cycles C3..C10, stars on 4..7 nodes, complete graphs K4..K9, paths on
    3..9 nodes, the rigid graphs R6 and R7, then one cycle-with-pendants
    pattern per entry of ``cycle_star_specs`` (``CYCLE_STAR_SPECS`` by default).
    """
    specs = CYCLE_STAR_SPECS if cycle_star_specs is None else cycle_star_specs
    return list(_roster(tuple(tuple(s) for s in specs)))


# -- roster files -------------------------------------------------------------


class PatternSpec(BaseModel):
    """One roster file entry. ``aut_order`` is never read from disk."""

    label: str
    k: int = Field(ge=2)
    edges: list[tuple[int, int]]
    family: str = "custom"

    @field_validator("family")
    @classmethod
    def _known_family(cls, value: str) -> str:
        if value not in FAMILIES:
            raise ValueError(f"unknown pattern family {value!r}")
        return value

    def build(self) -> Pattern:
        return make_pattern(self.k, self.edges, self.label, family=self.family)

    @classmethod
    def of(cls, p: Pattern) -> PatternSpec:
        return cls(label=p.label, k=p.k, edges=list(p.edges), family=p.family)


_ROSTER_ADAPTER = TypeAdapter(list[PatternSpec])


def parse_roster(text: str) -> list[Pattern]:
    specs = _ROSTER_ADAPTER.validate_json(text)
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ContractViolation("roster labels must be unique")
    return [spec.build() for spec in specs]


def load_roster(path: str | Path) -> list[Pattern]:
    roster = parse_roster(Path(path).read_text(encoding="utf-8"))
    _LOGGER.info("Loaded %d patterns from %s", len(roster), path)
    return roster


def dump_roster(patterns: Sequence[Pattern], path: str | Path) -> None:
    payload = [PatternSpec.of(p).model_dump() for p in patterns]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
