"""Tests for pair dataset generation and the manifest."""

from __future__ import annotations

from pathlib import Path

import networkx as nx
import pytest
from pydantic import ValidationError

from regraph.const import MANIFEST_FILENAME
from regraph.dataset import (
    DatasetManifest,
    DatasetSpec,
    GraphEntry,
    GroundTruth,
    PairDataset,
    PairEntry,
    PairMode,
    Provenance,
    build_dataset,
    generate_pair_dataset,
)
from regraph.exceptions import ContractViolation, InfeasibleParameters, UnverifiedPairsError


def _nx_iso(a, b) -> bool:
    ga, gb = nx.Graph(), nx.Graph()
    ga.add_nodes_from(range(a.n))
    gb.add_nodes_from(range(b.n))
    ga.add_edges_from(a.edges())
    gb.add_edges_from(b.edges())
    return nx.is_isomorphic(ga, gb)


def test_distinct_pairs_are_verified_non_isomorphic() -> None:
    spec = DatasetSpec(degrees=(3, 4), sizes=(8, 10), count=2)
    dataset = build_dataset(spec, seed=1)
    pairs = dataset.labeled_pairs()
    assert len(pairs) == 8
    for pair in pairs:
        assert pair.ground_truth is GroundTruth.NON_ISOMORPHIC
        assert pair.a.is_regular(pair.r) and pair.b.is_regular(pair.r)
        assert pair.a.n == pair.b.n == pair.n
        assert not _nx_iso(pair.a, pair.b)
    assert {p.provenance for p in dataset.manifest.pair_list} == {Provenance.EXACT_VERIFIED}


def test_generation_is_deterministic() -> None:
    spec = DatasetSpec(degrees=(3,), sizes=(12,), count=3)
    first = build_dataset(spec, seed=7)
    second = build_dataset(spec, seed=7)
    assert first.manifest == second.manifest
    assert first.graphs == second.graphs
    assert build_dataset(spec, seed=8).graphs != first.graphs


def test_sample_mode_takes_all_pairs() -> None:
    spec = DatasetSpec(degrees=(3,), sizes=(8, 12), count=4, mode=PairMode.SAMPLE)
    dataset = build_dataset(spec, seed=3)
    assert len(dataset.manifest.entries) == 8
    assert len(dataset.manifest.pair_list) == 12
    for pair in dataset.labeled_pairs():
        assert (pair.ground_truth is GroundTruth.ISOMORPHIC) == _nx_iso(pair.a, pair.b)


def test_sample_mode_needs_two_graphs() -> None:
    with pytest.raises(ContractViolation):
        build_dataset(DatasetSpec(degrees=(3,), sizes=(8,), count=1, mode=PairMode.SAMPLE), seed=0)


def test_relabel_mode_is_isomorphic_by_construction() -> None:
    spec = DatasetSpec(degrees=(5,), sizes=(100,), count=2, mode=PairMode.RELABEL)
    dataset = build_dataset(spec, seed=5, verify_up_to=0)
    for pair in dataset.labeled_pairs():
        assert pair.ground_truth is GroundTruth.ISOMORPHIC
        assert not pair.non_isomorphic
        assert _nx_iso(pair.a, pair.b)
    assert {p.provenance for p in dataset.manifest.pair_list} == {Provenance.CONSTRUCTION_GUARANTEED}


def test_large_pairs_are_assumed_distinct() -> None:
    spec = DatasetSpec(degrees=(3,), sizes=(20,), count=2)
    dataset = build_dataset(spec, seed=2, verify_up_to=10)
    assert dataset.manifest.has_unverified
    for entry in dataset.manifest.pair_list:
        assert entry.ground_truth is GroundTruth.UNVERIFIED
        assert entry.provenance is Provenance.ASSUMED_DISTINCT
    with pytest.raises(UnverifiedPairsError):
        dataset.labeled_pairs()
    assert all(p.non_isomorphic for p in dataset.labeled_pairs(require_verified=False))


def test_infeasible_cell_rejected() -> None:
    with pytest.raises(InfeasibleParameters):
        build_dataset(DatasetSpec(degrees=(3,), sizes=(5,), count=1), seed=0)


def test_files_roundtrip_and_are_byte_identical(tmp_path: Path) -> None:
    spec = DatasetSpec(degrees=(3,), sizes=(10, 12), count=2)
    manifest = generate_pair_dataset(spec, 11, tmp_path / "one")
    generate_pair_dataset(spec, 11, tmp_path / "two")
    files_one = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*") if p.is_file())
    files_two = sorted(p.relative_to(tmp_path / "two") for p in (tmp_path / "two").rglob("*") if p.is_file())
    assert files_one == files_two
    assert len(files_one) == len(manifest.entries) + 1
    for rel in files_one:
        assert (tmp_path / "one" / rel).read_bytes() == (tmp_path / "two" / rel).read_bytes()

    loaded = PairDataset.load(tmp_path / "one")
    assert loaded.manifest == manifest
    in_memory = build_dataset(spec, 11)
    for pair, expected in zip(loaded.labeled_pairs(), in_memory.labeled_pairs()):
        assert pair.a == expected.a and pair.b == expected.b


def test_empty_spec_writes_nothing(tmp_path: Path) -> None:
    manifest = generate_pair_dataset(DatasetSpec(), 0, tmp_path / "out")
    assert manifest.entries == [] and manifest.pair_list == []
    assert not (tmp_path / "out").exists()
    assert not (tmp_path / "out" / MANIFEST_FILENAME).exists()


def test_manifest_rejects_inconsistent_labels() -> None:
    entries = [
        GraphEntry(graph_id="a", path="graphs/a.edges", r=3, n=8),
        GraphEntry(graph_id="b", path="graphs/b.edges", r=3, n=8),
    ]
    with pytest.raises(ValidationError):
        DatasetManifest(
            entries=entries,
            pair_list=[
                PairEntry(
                    pair_id="p", a="a", b="b",
                    ground_truth=GroundTruth.UNVERIFIED,
                    provenance=Provenance.EXACT_VERIFIED,
                )
            ],
        )
    with pytest.raises(ValidationError):
        DatasetManifest(
            entries=entries,
            pair_list=[
                PairEntry(
                    pair_id="p", a="a", b="zzz",
                    ground_truth=GroundTruth.NON_ISOMORPHIC,
                    provenance=Provenance.EXACT_VERIFIED,
                )
            ],
        )
