"""Strict (induced) embedding counts and the subgraph-permutant operator.

A strict embedding of a pattern into a host is an injective node map that
preserves both edges and non-edges, i.e. an isomorphism onto an induced
subgraph of the host. The number of strict embeddings is the cardinality
of the subgraph permutant; dividing it by the number of injective maps
gives the value of the operator.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .const import CHI_DISPLAY_DIGITS
from .deadline import Deadline
from .exceptions import CapabilityError, ContractViolation, CountingInvariantError
from .graph import Graph
from .patterns import NormalizationConstant, Pattern, is_connected, normalization

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingCount:
    raw: int
    occurrences: int
    pattern_id: str
    host_n: int


@dataclass(frozen=True)
class OperatorValue:
    """The operator applied to one host.

    The operator output is constant ``raw / c_hat`` on the pattern's edges and
    zero elsewhere, so the ratio alone represents it.
    """

    count: EmbeddingCount
    c_hat: NormalizationConstant

    @property
    def value(self) -> Fraction:
        return Fraction(self.count.raw, self.c_hat.value)

    def decimal(self, digits: int = CHI_DISPLAY_DIGITS) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits
            return Decimal(self.count.raw) / Decimal(self.c_hat.value)


def _finish(raw: int, pattern: Pattern, host: Graph) -> EmbeddingCount:
    occurrences, rest = divmod(raw, pattern.aut_order)
    if rest:
        raise CountingInvariantError(
            f"{raw} embeddings of {pattern.label} is not a multiple of {pattern.aut_order}"
        )
    return EmbeddingCount(raw=raw, occurrences=occurrences, pattern_id=pattern.label, host_n=host.n)


def count_strict_embeddings(host: Graph, pattern: Pattern) -> EmbeddingCount:
    """Reference count over all injective maps of pattern nodes into host nodes.

    Exponential in the pattern size; used as the oracle for the anchored counter.
    """
    k = pattern.k
    if k > host.n:
        return EmbeddingCount(raw=0, occurrences=0, pattern_id=pattern.label, host_n=host.n)
    pairs = [(s, t, pattern.graph.has_edge(s, t)) for s, t in itertools.combinations(range(k), 2)]
    raw = 0
    for image in itertools.permutations(range(host.n), k):
        if all(host.has_edge(image[s], image[t]) == adj for s, t, adj in pairs):
            raw += 1
    return _finish(raw, pattern, host)


@dataclass(frozen=True)
class _MatchPlan:
    """Order in which pattern nodes are matched, with per-step constraints."""

    order: tuple[int, ...]
    parent: tuple[int, ...]  # position of an already-matched neighbor (-1 for the root)
    adjacent: tuple[tuple[int, ...], ...]  # earlier positions that must be host neighbors
    nonadjacent: tuple[tuple[int, ...], ...]  # earlier positions that must not be
    degree: tuple[int, ...]


def match_plan(pattern: Pattern) -> _MatchPlan:
    """BFS order from the highest-degree pattern node (lowest index on ties)."""
    g = pattern.graph
    root = max(range(g.n), key=lambda v: (g.degrees[v], -v))
    order = [root]
    seen = {root}
    head = 0
    while head < len(order):
        for w in g.neighbors[order[head]]:
            if w not in seen:
                seen.add(w)
                order.append(w)
        head += 1
    position = {v: i for i, v in enumerate(order)}
    parent: list[int] = [-1]
    adjacent: list[tuple[int, ...]] = [()]
    nonadjacent: list[tuple[int, ...]] = [()]
    for t in range(1, len(order)):
        v = order[t]
        earlier = order[:t]
        adj = tuple(position[w] for w in earlier if g.has_edge(v, w))
        parent.append(min(adj))
        adjacent.append(tuple(s for s in adj if s != parent[-1]))
        nonadjacent.append(tuple(position[w] for w in earlier if not g.has_edge(v, w)))
    return _MatchPlan(
        order=tuple(order),
        parent=tuple(parent),
        adjacent=tuple(adjacent),
        nonadjacent=tuple(nonadjacent),
        degree=tuple(g.degrees[v] for v in order),
    )


def count_strict_embeddings_anchored(
    host: Graph,
    pattern: Pattern,
    deadline: Deadline | None = None,
) -> EmbeddingCount:
    """Count strict embeddings by anchoring the first matched node at every host node.

    Every later pattern node has a matched neighbor, so its candidates come
    from one host adjacency list; per-anchor work depends on the host degree
    and the pattern only, and the total is linear in the host size for
    bounded degree.
    """
    if not is_connected(pattern.graph):
        raise CapabilityError(f"anchored counting needs a connected pattern, {pattern.label} is not")
    k = pattern.k
    if k > host.n:
        return EmbeddingCount(raw=0, occurrences=0, pattern_id=pattern.label, host_n=host.n)

    plan = match_plan(pattern)
    nbrs = host.neighbors
    nbr_sets = host.neighbor_sets
    degrees = host.degrees
    parent, adjacent, nonadjacent, need = plan.parent, plan.adjacent, plan.nonadjacent, plan.degree
    mapped = [0] * k
    used: set[int] = set()

    def extend(t: int) -> int:
        if t == k:
            return 1
        total = 0
        req, forb, deg = adjacent[t], nonadjacent[t], need[t]
        for c in nbrs[mapped[parent[t]]]:
            if c in used or degrees[c] < deg:
                continue
            cs = nbr_sets[c]
            if any(mapped[s] not in cs for s in req):
                continue
            if any(mapped[s] in cs for s in forb):
                continue
            mapped[t] = c
            used.add(c)
            total += extend(t + 1)
            used.discard(c)
        return total

    raw = 0
    root_degree = need[0]
    for anchor in range(host.n):
        if deadline is not None:
            deadline.check()
        if degrees[anchor] < root_degree:
            continue
        mapped[0] = anchor
        used.add(anchor)
        raw += extend(1)
        used.discard(anchor)
    count = _finish(raw, pattern, host)
    _LOGGER.debug("%s in %r: raw=%d occurrences=%d", pattern.label, host, raw, count.occurrences)
    return count


def evaluate_operator(
    host: Graph,
    pattern: Pattern,
    deadline: Deadline | None = None,
) -> OperatorValue:
    if host.n < pattern.k:
        raise ContractViolation(f"host has {host.n} nodes, pattern {pattern.label} needs {pattern.k}")
    count = count_strict_embeddings_anchored(host, pattern, deadline)
    return OperatorValue(count=count, c_hat=normalization(pattern, host.n))
