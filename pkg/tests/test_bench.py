"""Tests for the bench runner, aggregation, growth fits and output files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from regraph.baselines import Distinction
from regraph.bench import (
    BenchRecord,
    BenchRunner,
    CellSummary,
    Outcome,
    build_report,
    fit_growth,
    judge,
    sort_records,
    summarize,
    table_rows,
    write_outputs,
)
from regraph.config import resolve_bench_settings
from regraph.dataset import PairDataset, in_memory_dataset
from regraph.exceptions import ContractViolation
from regraph.graph import Graph, random_regular
from regraph.network import GeneoModel
from regraph.patterns import PatternSpec, make_cycle


@pytest.fixture
def triangle_model() -> GeneoModel:
    return GeneoModel(patterns=[PatternSpec.of(make_cycle(3)), PatternSpec.of(make_cycle(4))])


@pytest.fixture
def small_dataset(k33: Graph, prism: Graph, prism_relabeled: Graph) -> PairDataset:
    return in_memory_dataset([(k33, prism, True), (prism, prism_relabeled, False)])


def _settings(methods: str, **extra):
    return resolve_bench_settings(
        {"methods": methods, "serial": True, "repetitions": 1, **extra}, env={}
    )


def test_runner_outcomes(small_dataset: PairDataset, triangle_model: GeneoModel) -> None:
    settings = _settings("geneo-1,wl-1,filter-faster,filter-fast,exact")
    records = BenchRunner(settings, small_dataset, triangle_model).run()
    outcome = {(rec.method, rec.pair_id): rec.outcome for rec in records}
    assert len(records) == 10
    assert outcome["geneo-1", "pair0000"] is Outcome.CORRECT
    assert outcome["geneo-1", "pair0001"] is Outcome.CORRECT
    assert outcome["wl-1", "pair0000"] is Outcome.INCORRECT
    assert outcome["wl-1", "pair0001"] is Outcome.CORRECT
    assert outcome["filter-faster", "pair0000"] is Outcome.INCORRECT
    assert outcome["filter-fast", "pair0000"] is Outcome.CORRECT
    assert outcome["exact", "pair0000"] is Outcome.CORRECT
    assert outcome["exact", "pair0001"] is Outcome.CORRECT
    assert all(rec.r == 3 and rec.n == 6 and rec.seconds >= 0 for rec in records)
    assert [rec.method for rec in records[:2]] == ["geneo-1", "geneo-1"]


def test_runner_is_order_stable_with_workers(small_dataset: PairDataset, triangle_model: GeneoModel) -> None:
    serial = BenchRunner(_settings("geneo-2,filter-fast"), small_dataset, triangle_model).run()
    threaded = resolve_bench_settings(
        {"methods": "geneo-2,filter-fast", "workers": 4, "repetitions": 1}, env={}
    )
    parallel = BenchRunner(threaded, small_dataset, triangle_model).run()
    assert [(r.method, r.pair_id, r.outcome) for r in serial] == [
        (r.method, r.pair_id, r.outcome) for r in parallel
    ]


def test_geneo_needs_model(small_dataset: PairDataset) -> None:
    with pytest.raises(ContractViolation):
        BenchRunner(_settings("geneo-1"), small_dataset, None)


def test_crash_is_recorded_as_incorrect(small_dataset: PairDataset, caplog: pytest.LogCaptureFixture) -> None:
    runner = BenchRunner(_settings("wl-1,filter-fast"), small_dataset)

    def boom(pair, timeout):
        raise RuntimeError("boom")

    runner.methods["wl-1"] = boom
    records = runner.run()
    crashed = [rec for rec in records if rec.method == "wl-1"]
    assert [rec.outcome for rec in crashed] == [Outcome.INCORRECT, Outcome.INCORRECT]
    assert any("crashed" in message for message in caplog.messages)
    assert len([rec for rec in records if rec.method == "filter-fast"]) == 2


def test_tiny_timeout_on_large_pairs() -> None:
    a = random_regular(1000, 3, seed=1)
    b = random_regular(1000, 3, seed=2)
    dataset = in_memory_dataset([(a, b, True)])
    settings = _settings("wl-3", timeout_secs=0.01)
    records = BenchRunner(settings, dataset).run()
    assert [rec.outcome for rec in records] == [Outcome.TIMED_OUT]
    cell = summarize(records)[0]
    assert cell.accuracy == 0.0
    assert cell.timed_out == 1


def test_judge() -> None:
    class _Pair:
        non_isomorphic = True

    assert judge(Distinction.DISTINGUISHED, _Pair()) is Outcome.CORRECT
    assert judge(Distinction.NOT_DISTINGUISHED, _Pair()) is Outcome.INCORRECT
    assert judge(Distinction.TIMED_OUT, _Pair()) is Outcome.TIMED_OUT
    _Pair.non_isomorphic = False
    assert judge(Distinction.NOT_DISTINGUISHED, _Pair()) is Outcome.CORRECT


def _record(method: str, n: int, pair: str, outcome: Outcome, seconds: float) -> BenchRecord:
    return BenchRecord(method=method, r=3, n=n, pair_id=pair, outcome=outcome, seconds=seconds)


def test_summarize_counts_timeouts_as_incorrect() -> None:
    records = [
        _record("wl-1", 10, "p0", Outcome.CORRECT, 1.0),
        _record("wl-1", 10, "p1", Outcome.TIMED_OUT, 3.0),
        _record("wl-1", 10, "p2", Outcome.INCORRECT, 2.0),
        _record("wl-1", 10, "p3", Outcome.CORRECT, 2.0),
    ]
    [cell] = summarize(records)
    assert cell.pairs == 4
    assert cell.correct == 2
    assert cell.timed_out == 1
    assert cell.accuracy == 0.5
    assert cell.mean_seconds == 2.0


def test_sort_records() -> None:
    records = [
        _record("wl-1", 20, "b", Outcome.CORRECT, 0.1),
        _record("geneo-1", 20, "a", Outcome.CORRECT, 0.1),
        _record("wl-1", 10, "c", Outcome.CORRECT, 0.1),
        _record("wl-1", 10, "a", Outcome.CORRECT, 0.1),
    ]
    ordered = [(rec.method, rec.n, rec.pair_id) for rec in sort_records(records)]
    assert ordered == [("geneo-1", 20, "a"), ("wl-1", 10, "a"), ("wl-1", 10, "c"), ("wl-1", 20, "b")]


def test_fit_growth_linear_series() -> None:
    cells = [
        CellSummary(method="geneo-3", r=3, n=n, pairs=1, correct=1, timed_out=0, accuracy=1.0, mean_seconds=0.002 * n)
        for n in (100, 200, 400, 800)
    ]
    [fit] = fit_growth(cells)
    assert fit.slope == pytest.approx(0.002)
    assert fit.intercept == pytest.approx(0.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.loglog_slope == pytest.approx(1.0)


def test_fit_growth_skips_single_size() -> None:
    cell = CellSummary(method="wl-1", r=3, n=50, pairs=1, correct=1, timed_out=0, accuracy=1.0, mean_seconds=0.1)
    assert fit_growth([cell]) == []


def test_table_rows_layout() -> None:
    records = [
        _record("geneo-1", 10, "p0", Outcome.CORRECT, 0.5),
        _record("geneo-1", 20, "p1", Outcome.INCORRECT, 1.5),
        _record("wl-1", 10, "p0", Outcome.INCORRECT, 0.25),
    ]
    header, rows = table_rows(summarize(records), 3)
    assert header == ["method", "time_10", "accuracy_10", "time_20", "accuracy_20"]
    assert rows[0] == ["geneo-1", "0.5000", "1.000", "1.5000", "0.000"]
    assert rows[1] == ["wl-1", "0.2500", "0.000", "", ""]


def test_write_outputs(tmp_path: Path, small_dataset: PairDataset, triangle_model: GeneoModel) -> None:
    settings = _settings("geneo-1,filter-fast")
    records = BenchRunner(settings, small_dataset, triangle_model).run()
    report = build_report(settings, records, manifest="memory")
    written = write_outputs(report, records, tmp_path / "bench")
    assert sorted(p.name for p in written) == ["records.csv", "report.json", "summary.csv", "table_r3.csv"]
    with (tmp_path / "bench" / "records.csv").open(encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["method", "r", "N", "pair_id", "outcome", "seconds"]
    assert len(rows) == 4
    payload = json.loads((tmp_path / "bench" / "report.json").read_text(encoding="utf-8"))
    assert payload["config"]["methods"] == ["geneo-1", "filter-fast"]
    assert payload["config"]["manifest"] == "memory"
    assert {cell["method"] for cell in payload["cells"]} == {"geneo-1", "filter-fast"}
