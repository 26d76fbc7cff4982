"""Comparison methods: k-WL refinement, invariant filters and an exact oracle."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .const import DEFAULT_WL_MAX_TUPLES, FILTER_LEVELS
from .deadline import Deadline, resolve
from .exceptions import CapabilityError, ContractViolation, DeadlineExceeded
from .graph import Graph, NodePermutation

_LOGGER = logging.getLogger(__name__)


class Distinction(StrEnum):
    DISTINGUISHED = "distinguished"
    NOT_DISTINGUISHED = "not-distinguished"
    TIMED_OUT = "timed-out"


class IsoStatus(StrEnum):
    ISOMORPHIC = "isomorphic"
    NON_ISOMORPHIC = "non-isomorphic"
    TIMED_OUT = "timed-out"


# -- Weisfeiler-Lehman --------------------------------------------------------


@dataclass(frozen=True)
class WlCertificate:
    k: int
    histogram: tuple[tuple[int, int], ...]  # (color id, class size), sorted by id
    rounds: int

    @property
    def total(self) -> int:
        return sum(size for _, size in self.histogram)


def _histograms_differ(colors: Sequence[Sequence[int]]) -> bool:
    first = Counter(colors[0])
    return any(Counter(c) != first for c in colors[1:])


def _refine_1wl(graphs: Sequence[Graph], deadline: Deadline, stop_on_split: bool):
    """Joint color refinement; color ids are canonical across ``graphs``."""
    colors = [[0] * g.n for g in graphs]
    classes = 1
    rounds = 0
    while True:
        deadline.check()
        signatures = [
            [(c[v], tuple(sorted(c[w] for w in g.neighbors[v]))) for v in range(g.n)]
            for g, c in zip(graphs, colors)
        ]
        palette = {s: i for i, s in enumerate(sorted(set().union(*signatures)))}
        colors = [[palette[s] for s in sig] for sig in signatures]
        rounds += 1
        if stop_on_split and _histograms_differ(colors):
            return colors, rounds, True
        if len(palette) == classes:
            return colors, rounds, False
        classes = len(palette)


def _atomic_types(adj: np.ndarray, k: int) -> np.ndarray:
    """Ordered isomorphism type of every k-tuple, encoded as an integer."""
    n = adj.shape[0]
    code = np.zeros((n,) * k, dtype=np.int32)
    nodes = np.arange(n)
    for i, j in itertools.combinations(range(k), 2):
        shape_i = [1] * k
        shape_i[i] = n
        shape_j = [1] * k
        shape_j[j] = n
        vi = nodes.reshape(shape_i)
        vj = nodes.reshape(shape_j)
        state = np.where(vi == vj, 2, adj[vi, vj].astype(np.int32))
        code = code * 3 + state
    return code


def _canonical_ids(rows: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int32), uniq.shape[0]


def _refine_kwl(graphs: Sequence[Graph], k: int, deadline: Deadline, stop_on_split: bool):
    """Classical (oblivious) k-WL on a stack of graphs sharing one color space.

    A tuple's new color is its old color together with, for every coordinate
    j, the multiset of colors of the tuples obtained by substituting each
    node w at coordinate j.
    """
    n = graphs[0].n
    stack = np.stack([_atomic_types(g.adjacency_matrix(), k) for g in graphs])
    ids, classes = _canonical_ids(stack.reshape(-1, 1))
    colors = ids.reshape(stack.shape)
    rounds = 0
    if stop_on_split and _stack_histograms_differ(colors, classes):
        return colors, rounds, True
    while True:
        deadline.check()
        columns = [colors.reshape(-1)]
        for j in range(k):
            axis = j + 1
            fibers = np.moveaxis(np.sort(colors, axis=axis), axis, -1).reshape(-1, n)
            fiber_ids, _ = _canonical_ids(fibers)
            reduced = fiber_ids.reshape(colors.shape[:axis] + colors.shape[axis + 1 :])
            columns.append(
                np.broadcast_to(np.expand_dims(reduced, axis), colors.shape).reshape(-1)
            )
            deadline.check()
        ids, new_classes = _canonical_ids(np.stack(columns, axis=1))
        colors = ids.reshape(colors.shape)
        rounds += 1
        if stop_on_split and _stack_histograms_differ(colors, new_classes):
            return colors, rounds, True
        if new_classes == classes:
            return colors, rounds, False
        classes = new_classes


def _stack_histograms_differ(colors: np.ndarray, classes: int) -> bool:
    first = np.bincount(colors[0].reshape(-1), minlength=classes)
    return any(
        not np.array_equal(first, np.bincount(c.reshape(-1), minlength=classes))
        for c in colors[1:]
    )


def _check_k(k: int) -> None:
    if k not in (1, 2, 3):
        raise ContractViolation(f"WL dimension must be 1, 2 or 3, got {k}")


def wl_certificate(g: Graph, k: int, deadline: Deadline | float | None = None) -> WlCertificate:
    """Stable k-WL color histogram of a single graph."""
    _check_k(k)
    dl = resolve(deadline)
    if k == 1:
        colors, rounds, _ = _refine_1wl([g], dl, stop_on_split=False)
        flat = colors[0]
    else:
        stack, rounds, _ = _refine_kwl([g], k, dl, stop_on_split=False)
        flat = stack[0].reshape(-1).tolist()
    histogram = tuple(sorted(Counter(flat).items()))
    return WlCertificate(k=k, histogram=histogram, rounds=rounds)


def wl_test(
    a: Graph,
    b: Graph,
    k: int,
    timeout: Deadline | float | None = None,
    *,
    max_tuples: int = DEFAULT_WL_MAX_TUPLES,
) -> Distinction:
    """Run k-WL jointly on both graphs; distinguished iff the color histograms differ.

    Tuple tables larger than ``max_tuples`` are refused: with a timeout the
    run reports timed-out, without one it raises :class:`CapabilityError`.
    """
    _check_k(k)
    if a.n != b.n:
        raise ContractViolation(f"graphs have different sizes ({a.n} vs {b.n})")
    dl = resolve(timeout)
    if k > 1 and 2 * a.n**k > max_tuples:
        if dl.seconds is None:
            raise CapabilityError(
                f"{k}-WL on N={a.n} needs {2 * a.n**k} tuples (limit {max_tuples})"
            )
        _LOGGER.warning(
            "%d-WL on N=%d needs %d tuples (limit %d); reporting timed-out",
            k, a.n, 2 * a.n**k, max_tuples,
        )
        return Distinction.TIMED_OUT
    try:
        if k == 1:
            _, rounds, split = _refine_1wl([a, b], dl, stop_on_split=True)
        else:
            _, rounds, split = _refine_kwl([a, b], k, dl, stop_on_split=True)
    except DeadlineExceeded:
        _LOGGER.debug("%d-WL timed out after %.3fs", k, dl.elapsed)
        return Distinction.TIMED_OUT
    _LOGGER.debug("%d-WL finished in %d rounds, split=%s", k, rounds, split)
    return Distinction.DISTINGUISHED if split else Distinction.NOT_DISTINGUISHED


# -- invariant filters --------------------------------------------------------


@dataclass(frozen=True)
class FilterSignature:
    degree_sorted: tuple[int, ...]
    triangle_sorted: tuple[int, ...] | None = None
    max_clique: int | None = None


def triangle_counts(g: Graph) -> list[int]:
    """Number of triangles through each node."""
    sets = g.neighbor_sets
    return [
        sum(len(sets[v] & sets[u]) for u in g.neighbors[v]) // 2 for v in range(g.n)
    ]


def _color_sort(cand: list[int], sets: Sequence[frozenset[int]]) -> tuple[list[int], list[int]]:
    classes: list[list[int]] = []
    for v in cand:
        for cls in classes:
            if not any(u in sets[v] for u in cls):
                cls.append(v)
                break
        else:
            classes.append([v])
    order: list[int] = []
    bounds: list[int] = []
    for color, cls in enumerate(classes, start=1):
        order.extend(cls)
        bounds.extend([color] * len(cls))
    return order, bounds


def max_clique_size(g: Graph, deadline: Deadline | float | None = None) -> int:
    """Exact maximum clique size by branch and bound with a greedy-coloring bound."""
    if g.n == 0:
        return 0
    dl = resolve(deadline)
    sets = g.neighbor_sets
    best = 1

    def expand(size: int, cand: list[int]) -> None:
        nonlocal best
        order, bounds = _color_sort(cand, sets)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best:
                return
            v = order[i]
            nxt = [u for u in order[:i] if u in sets[v]]
            if nxt:
                expand(size + 1, nxt)
            elif size + 1 > best:
                best = size + 1

    for v in range(g.n):
        if v % 256 == 0:
            dl.check()
        forward = [u for u in g.neighbors[v] if u > v]
        if len(forward) + 1 > best:
            expand(1, forward)
    return best


def filter_signature(g: Graph, level: str, deadline: Deadline | float | None = None) -> FilterSignature:
    if level not in FILTER_LEVELS:
        raise ContractViolation(f"unknown filter level {level!r}")
    triangles = tuple(sorted(triangle_counts(g))) if level in ("fast", "could") else None
    clique = max_clique_size(g, deadline) if level == "could" else None
    return FilterSignature(tuple(g.degree_sequence()), triangles, clique)


def filter_test(
    a: Graph,
    b: Graph,
    level: str,
    timeout: Deadline | float | None = None,
) -> Distinction:
    """faster: degree sequence; fast: + triangle counts; could: + maximum clique size."""
    dl = resolve(timeout)
    try:
        sig_a = filter_signature(a, level, dl)
        sig_b = filter_signature(b, level, dl)
    except DeadlineExceeded:
        return Distinction.TIMED_OUT
    return Distinction.NOT_DISTINGUISHED if sig_a == sig_b else Distinction.DISTINGUISHED


# -- exact oracle -------------------------------------------------------------


@dataclass(frozen=True)
class IsoResult:
    status: IsoStatus
    mapping: NodePermutation | None = None


def _joint_refine(a: Graph, b: Graph, ca: list[int], cb: list[int], deadline: Deadline):
    """Equitable refinement of both colorings in one color space; None if they diverge."""
    classes = len(set(ca))
    while True:
        deadline.check()
        sa = [(ca[v], tuple(sorted(ca[w] for w in a.neighbors[v]))) for v in range(a.n)]
        sb = [(cb[v], tuple(sorted(cb[w] for w in b.neighbors[v]))) for v in range(b.n)]
        if Counter(sa) != Counter(sb):
            return None
        palette = {s: i for i, s in enumerate(sorted(set(sa)))}
        ca = [palette[s] for s in sa]
        cb = [palette[s] for s in sb]
        if len(palette) == classes:
            return ca, cb
        classes = len(palette)


def _is_isomorphism(a: Graph, b: Graph, sigma: list[int]) -> bool:
    return all(b.has_edge(sigma[i], sigma[j]) for i, j in a.edges())


def _search(a: Graph, b: Graph, ca: list[int], cb: list[int], deadline: Deadline) -> list[int] | None:
    refined = _joint_refine(a, b, ca, cb, deadline)
    if refined is None:
        return None
    ca, cb = refined
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(ca):
        cells.setdefault(c, []).append(v)
    open_cells = [(len(vs), c) for c, vs in cells.items() if len(vs) > 1]
    if not open_cells:
        node_of = {c: u for u, c in enumerate(cb)}
        sigma = [node_of[c] for c in ca]
        return sigma if _is_isomorphism(a, b, sigma) else None
    _, target = min(open_cells)
    v = cells[target][0]
    fresh = max(ca) + 1
    for u in (u for u, c in enumerate(cb) if c == target):
        ca2 = list(ca)
        cb2 = list(cb)
        ca2[v] = fresh
        cb2[u] = fresh
        found = _search(a, b, ca2, cb2, deadline)
        if found is not None:
            return found
    return None


def exact_isomorphic(a: Graph, b: Graph, timeout: Deadline | float | None = None) -> IsoResult:
    """Complete isomorphism search by individualization and refinement.

    Cells of the joint equitable partition are split by fixing one node of
    the smallest open cell in ``a`` and trying every node of the matching
    cell in ``b``. A discrete partition is checked edge by edge before it is
    returned, so the mapping satisfies ``apply_permutation(a, mapping) == b``.
    """
    if a.n != b.n or a.edge_count != b.edge_count or a.degree_sequence() != b.degree_sequence():
        return IsoResult(IsoStatus.NON_ISOMORPHIC)
    dl = resolve(timeout)
    try:
        sigma = _search(a, b, [0] * a.n, [0] * b.n, dl)
    except DeadlineExceeded:
        _LOGGER.debug("exact search timed out after %.3fs", dl.elapsed)
        return IsoResult(IsoStatus.TIMED_OUT)
    if sigma is None:
        return IsoResult(IsoStatus.NON_ISOMORPHIC)
    return IsoResult(IsoStatus.ISOMORPHIC, NodePermutation(tuple(sigma)))
