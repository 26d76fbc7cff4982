"""Subgraph-permutant operators for telling regular graphs apart."""

from __future__ import annotations

from .graph import Graph, NodePermutation, apply_permutation, pad_graph, random_regular
from .network import ScoreVector, Verdict, forward_select, score_pair, verdict
from .patterns import Pattern, default_roster

__version__ = "0.3.0"

__all__ = [
    "Graph",
    "NodePermutation",
    "Pattern",
    "ScoreVector",
    "Verdict",
    "apply_permutation",
    "default_roster",
    "forward_select",
    "pad_graph",
    "random_regular",
    "score_pair",
    "verdict",
]
