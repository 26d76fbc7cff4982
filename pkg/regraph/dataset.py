"""Pair datasets of random r-regular graphs and their JSON manifest."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path, PurePosixPath

from pydantic import BaseModel, Field, model_validator

from .baselines import IsoStatus, exact_isomorphic
from .const import (
    DEFAULT_RETRY_BUDGET,
    DEFAULT_VERIFY_UP_TO,
    GRAPH_DIR,
    GRAPH_SUFFIX,
    MANIFEST_FILENAME,
)
from .exceptions import ContractViolation, GenerationFailure, UnverifiedPairsError
from .graph import (
    Graph,
    NodePermutation,
    apply_permutation,
    check_regular_parameters,
    make_rng,
    random_regular,
    read_graph,
    write_graph,
)

_LOGGER = logging.getLogger(__name__)


class GroundTruth(StrEnum):
    ISOMORPHIC = "isomorphic"
    NON_ISOMORPHIC = "non-isomorphic"
    UNVERIFIED = "unverified"


class Provenance(StrEnum):
    EXACT_VERIFIED = "exact-verified"
    CONSTRUCTION_GUARANTEED = "construction-guaranteed"
    ASSUMED_DISTINCT = "assumed-distinct"


class PairMode(StrEnum):
    DISTINCT = "distinct"  # independent non-isomorphic pairs
    SAMPLE = "sample"  # m graphs per cell, every one of the C(m, 2) pairs
    RELABEL = "relabel"  # a graph and a random relabeling of it


class GraphEntry(BaseModel):
    graph_id: str
    path: str
    r: int = Field(ge=0)
    n: int = Field(ge=0)


class PairEntry(BaseModel):
    pair_id: str
    a: str
    b: str
    ground_truth: GroundTruth
    provenance: Provenance


class DatasetManifest(BaseModel):
    entries: list[GraphEntry] = Field(default_factory=list)
    pair_list: list[PairEntry] = Field(default_factory=list)
    seed: int | None = None

    @model_validator(mode="after")
    def validate_pairs(self) -> DatasetManifest:
        ids = {e.graph_id for e in self.entries}
        if len(ids) != len(self.entries):
            raise ValueError("graph ids must be unique")
        for pair in self.pair_list:
            if pair.a not in ids or pair.b not in ids:
                raise ValueError(f"pair {pair.pair_id} references unknown graphs")
            unverified = pair.ground_truth is GroundTruth.UNVERIFIED
            assumed = pair.provenance is Provenance.ASSUMED_DISTINCT
            if unverified != assumed:
                raise ValueError(
                    f"pair {pair.pair_id}: ground truth 'unverified' goes with "
                    "provenance 'assumed-distinct' and only with it"
                )
        return self

    @property
    def has_unverified(self) -> bool:
        return any(p.ground_truth is GroundTruth.UNVERIFIED for p in self.pair_list)


@dataclass(frozen=True)
class DatasetSpec:
    """Degrees x sizes grid; ``count`` is pairs per cell, or graphs per cell in sample mode."""

    degrees: tuple[int, ...] = ()
    sizes: tuple[int, ...] = ()
    count: int = 1
    mode: PairMode = PairMode.DISTINCT

    def cells(self) -> list[tuple[int, int]]:
        return [(r, n) for r in self.degrees for n in self.sizes]

    def validate(self) -> None:
        if self.count < 1:
            raise ContractViolation(f"need at least one item per cell, got {self.count}")
        if self.mode is PairMode.SAMPLE and self.count < 2:
            raise ContractViolation("sample mode needs at least two graphs per cell")
        for r, n in self.cells():
            check_regular_parameters(n, r)


@dataclass(frozen=True)
class LabeledPair:
    pair_id: str
    a_id: str
    b_id: str
    a: Graph
    b: Graph
    r: int
    n: int
    ground_truth: GroundTruth

    @property
    def non_isomorphic(self) -> bool:
        """Target label for scoring; assumed-distinct pairs count as non-isomorphic."""
        return self.ground_truth is not GroundTruth.ISOMORPHIC


@dataclass
class PairDataset:
    """A manifest together with its graphs, loaded lazily from ``root``."""

    manifest: DatasetManifest
    root: Path | None = None
    graphs: dict[str, Graph] = field(default_factory=dict)

    @classmethod
    def load(cls, manifest_path: str | Path) -> PairDataset:
        path = Path(manifest_path)
        if path.is_dir():
            path = path / MANIFEST_FILENAME
        try:
            text = path.read_bytes().decode("utf-8")
        except UnicodeDecodeError as err:
            raise ContractViolation(f"{path} is not UTF-8 (byte {err.start})") from None
        manifest = DatasetManifest.model_validate_json(text)
        _LOGGER.info(
            "Loaded manifest %s: %d graphs, %d pairs",
            path, len(manifest.entries), len(manifest.pair_list),
        )
        return cls(manifest=manifest, root=path.parent)

    def graph(self, graph_id: str) -> Graph:
        if graph_id not in self.graphs:
            if self.root is None:
                raise ContractViolation(f"graph {graph_id} is not loaded and has no file root")
            entry = next(e for e in self.manifest.entries if e.graph_id == graph_id)
            self.graphs[graph_id] = read_graph(self.root / entry.path)
        return self.graphs[graph_id]

    def labeled_pairs(self, *, require_verified: bool = True) -> list[LabeledPair]:
        if require_verified and self.manifest.has_unverified:
            bad = sum(p.ground_truth is GroundTruth.UNVERIFIED for p in self.manifest.pair_list)
            raise UnverifiedPairsError(f"{bad} pairs have no verified ground truth")
        meta = {e.graph_id: e for e in self.manifest.entries}
        return [
            LabeledPair(
                pair_id=p.pair_id,
                a_id=p.a,
                b_id=p.b,
                a=self.graph(p.a),
                b=self.graph(p.b),
                r=meta[p.a].r,
                n=meta[p.a].n,
                ground_truth=p.ground_truth,
            )
            for p in self.manifest.pair_list
        ]


def _graph_path(graph_id: str) -> str:
    return str(PurePosixPath(GRAPH_DIR) / f"{graph_id}{GRAPH_SUFFIX}")


def _label(a: Graph, b: Graph, n: int, verify_up_to: int) -> tuple[GroundTruth, Provenance]:
    if n > verify_up_to:
        return GroundTruth.UNVERIFIED, Provenance.ASSUMED_DISTINCT
    status = exact_isomorphic(a, b).status
    truth = GroundTruth.ISOMORPHIC if status is IsoStatus.ISOMORPHIC else GroundTruth.NON_ISOMORPHIC
    return truth, Provenance.EXACT_VERIFIED


def _distinct_cell(r, n, spec, seed, verify_up_to, retry_budget) -> Iterator[tuple]:
    for p in range(spec.count):
        a_id, b_id = f"r{r}_n{n}_p{p:03d}_a", f"r{r}_n{n}_p{p:03d}_b"
        a = random_regular(n, r, make_rng(seed, r, n, p, 0), retry_budget=retry_budget)
        for attempt in range(retry_budget):
            b = random_regular(n, r, make_rng(seed, r, n, p, 1, attempt), retry_budget=retry_budget)
            if b == a:
                continue
            truth, provenance = _label(a, b, n, verify_up_to)
            if truth is not GroundTruth.ISOMORPHIC:
                break
            _LOGGER.debug("r=%d n=%d pair %d: partner isomorphic, redrawing", r, n, p)
        else:
            raise GenerationFailure(
                f"no non-isomorphic partner for r={r}, n={n} after {retry_budget} draws"
            )
        yield (a_id, a), (b_id, b), PairEntry(
            pair_id=f"r{r}_n{n}_p{p:03d}", a=a_id, b=b_id,
            ground_truth=truth, provenance=provenance,
        )


def _sample_cell(r, n, spec, seed, verify_up_to, retry_budget) -> Iterator[tuple]:
    ids = [f"r{r}_n{n}_g{i:02d}" for i in range(spec.count)]
    graphs = [
        random_regular(n, r, make_rng(seed, r, n, i), retry_budget=retry_budget)
        for i in range(spec.count)
    ]
    for i, j in itertools.combinations(range(spec.count), 2):
        truth, provenance = _label(graphs[i], graphs[j], n, verify_up_to)
        yield (ids[i], graphs[i]), (ids[j], graphs[j]), PairEntry(
            pair_id=f"r{r}_n{n}_g{i:02d}_g{j:02d}", a=ids[i], b=ids[j],
            ground_truth=truth, provenance=provenance,
        )


def _relabel_cell(r, n, spec, seed, verify_up_to, retry_budget) -> Iterator[tuple]:
    for p in range(spec.count):
        a = random_regular(n, r, make_rng(seed, r, n, p, 0), retry_budget=retry_budget)
        b = apply_permutation(a, NodePermutation.random(n, make_rng(seed, r, n, p, 1)))
        yield (f"r{r}_n{n}_p{p:03d}_a", a), (f"r{r}_n{n}_p{p:03d}_b", b), PairEntry(
            pair_id=f"r{r}_n{n}_p{p:03d}", a=f"r{r}_n{n}_p{p:03d}_a", b=f"r{r}_n{n}_p{p:03d}_b",
            ground_truth=GroundTruth.ISOMORPHIC,
            provenance=Provenance.CONSTRUCTION_GUARANTEED,
        )


_CELL_BUILDERS = {
    PairMode.DISTINCT: _distinct_cell,
    PairMode.SAMPLE: _sample_cell,
    PairMode.RELABEL: _relabel_cell,
}


def build_dataset(
    spec: DatasetSpec,
    seed: int,
    *,
    verify_up_to: int = DEFAULT_VERIFY_UP_TO,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
) -> PairDataset:
    """Generate a dataset in memory. Graph streams depend only on (seed, cell, index)."""
    spec.validate()
    builder = _CELL_BUILDERS[spec.mode]
    manifest = DatasetManifest(seed=seed)
    graphs: dict[str, Graph] = {}
    for r, n in spec.cells():
        for (a_id, a), (b_id, b), pair in builder(r, n, spec, seed, verify_up_to, retry_budget):
            for graph_id, g in ((a_id, a), (b_id, b)):
                if graph_id not in graphs:
                    graphs[graph_id] = g
                    manifest.entries.append(
                        GraphEntry(graph_id=graph_id, path=_graph_path(graph_id), r=r, n=n)
                    )
            manifest.pair_list.append(pair)
        _LOGGER.info("Cell r=%d n=%d done (%d pairs so far)", r, n, len(manifest.pair_list))
    DatasetManifest.model_validate(manifest.model_dump())
    return PairDataset(manifest=manifest, graphs=graphs)


def write_dataset(dataset: PairDataset, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    (out / GRAPH_DIR).mkdir(parents=True, exist_ok=True)
    for entry in dataset.manifest.entries:
        write_graph(dataset.graphs[entry.graph_id], out / entry.path)
    manifest_path = out / MANIFEST_FILENAME
    manifest_path.write_text(dataset.manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    dataset.root = out
    _LOGGER.info("Wrote %d graphs and %s", len(dataset.manifest.entries), manifest_path)
    return manifest_path


def generate_pair_dataset(
    spec: DatasetSpec,
    seed: int,
    out_dir: str | Path,
    *,
    verify_up_to: int = DEFAULT_VERIFY_UP_TO,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
) -> DatasetManifest:
    """Generate graphs and manifest under ``out_dir``.

    Pairs with N <= ``verify_up_to`` are labeled by the exact oracle; larger
    pairs are assumed distinct. An empty grid writes nothing.
    """
    dataset = build_dataset(spec, seed, verify_up_to=verify_up_to, retry_budget=retry_budget)
    if dataset.manifest.entries:
        write_dataset(dataset, out_dir)
    return dataset.manifest


def in_memory_dataset(pairs: Sequence[tuple[Graph, Graph, bool]]) -> PairDataset:
    """Wrap explicit ``(a, b, non_isomorphic)`` triples as an exactly labeled dataset."""
    manifest = DatasetManifest()
    graphs: dict[str, Graph] = {}
    for idx, (a, b, non_iso) in enumerate(pairs):
        a_id, b_id = f"pair{idx:04d}_a", f"pair{idx:04d}_b"
        for graph_id, g in ((a_id, a), (b_id, b)):
            graphs[graph_id] = g
            r = g.degrees[0] if g.n and g.is_regular() else 0
            manifest.entries.append(GraphEntry(graph_id=graph_id, path=_graph_path(graph_id), r=r, n=g.n))
        manifest.pair_list.append(
            PairEntry(
                pair_id=f"pair{idx:04d}", a=a_id, b=b_id,
                ground_truth=GroundTruth.NON_ISOMORPHIC if non_iso else GroundTruth.ISOMORPHIC,
                provenance=Provenance.EXACT_VERIFIED,
            )
        )
    return PairDataset(manifest=manifest, graphs=graphs)
