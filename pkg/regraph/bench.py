"""Method comparison over a pair dataset: records, per-cell summaries and growth fits."""

from __future__ import annotations

import csv
import logging
import time
from collections import defaultdict
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from .baselines import Distinction, IsoStatus, exact_isomorphic, filter_test, wl_test
from .config import BenchSettings
from .const import METHOD_EXACT, METHOD_FILTER, METHOD_GENEO, METHOD_OPTIONS, METHOD_WL
from .dataset import LabeledPair, PairDataset
from .deadline import Deadline
from .exceptions import ContractViolation, DeadlineExceeded
from .network import Decision, GeneoModel, score_pair, verdict

_LOGGER = logging.getLogger(__name__)


class Outcome(StrEnum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    TIMED_OUT = "timed-out"


@dataclass(frozen=True)
class BenchRecord:
    method: str
    r: int
    n: int
    pair_id: str
    outcome: Outcome
    seconds: float


MethodFn = Callable[[LabeledPair, float], Distinction]


def _geneo_method(model: GeneoModel, t: int) -> MethodFn:
    patterns = model.prefix(t)

    def run(pair: LabeledPair, timeout: float) -> Distinction:
        try:
            scores = score_pair(pair.a, pair.b, patterns, pad=True, deadline=Deadline(timeout))
        except DeadlineExceeded:
            return Distinction.TIMED_OUT
        if verdict(scores).decision is Decision.NON_ISOMORPHIC:
            return Distinction.DISTINGUISHED
        return Distinction.NOT_DISTINGUISHED

    return run


def _wl_method(k: int) -> MethodFn:
    return lambda pair, timeout: wl_test(pair.a, pair.b, k, timeout)


def _filter_method(level: str) -> MethodFn:
    return lambda pair, timeout: filter_test(pair.a, pair.b, level, timeout)


def _exact_method(pair: LabeledPair, timeout: float) -> Distinction:
    status = exact_isomorphic(pair.a, pair.b, timeout).status
    if status is IsoStatus.TIMED_OUT:
        return Distinction.TIMED_OUT
    if status is IsoStatus.NON_ISOMORPHIC:
        return Distinction.DISTINGUISHED
    return Distinction.NOT_DISTINGUISHED


def build_methods(names: Sequence[str], model: GeneoModel | None) -> dict[str, MethodFn]:
    methods: dict[str, MethodFn] = {}
    for name in names:
        if name in METHOD_GENEO:
            if model is None:
                raise ContractViolation(f"{name} needs a GENEO model")
            methods[name] = _geneo_method(model, METHOD_GENEO.index(name) + 1)
        elif name in METHOD_WL:
            methods[name] = _wl_method(METHOD_WL.index(name) + 1)
        elif name in METHOD_FILTER:
            methods[name] = _filter_method(name.removeprefix("filter-"))
        elif name == METHOD_EXACT:
            methods[name] = _exact_method
        else:
            raise ContractViolation(f"unknown method {name!r}")
    return methods


def judge(distinction: Distinction, pair: LabeledPair) -> Outcome:
    """Distinguishing a non-isomorphic pair, or not distinguishing an isomorphic one, is correct."""
    if distinction is Distinction.TIMED_OUT:
        return Outcome.TIMED_OUT
    distinguished = distinction is Distinction.DISTINGUISHED
    return Outcome.CORRECT if distinguished == pair.non_isomorphic else Outcome.INCORRECT


class BenchRunner:
    """Run every method on every pair of a dataset."""

    def __init__(
        self,
        settings: BenchSettings,
        dataset: PairDataset,
        model: GeneoModel | None = None,
    ) -> None:
        self.settings = settings
        self.dataset = dataset
        self.methods = build_methods(settings.methods, model)

    def _run_one(self, method: str, pair: LabeledPair) -> BenchRecord:
        fn = self.methods[method]
        timeout = self.settings.timeout_for(pair.r)
        times: list[float] = []
        outcome = Outcome.INCORRECT
        try:
            for rep in range(self.settings.repetitions_for(pair.n)):
                started = time.perf_counter()
                result = fn(pair, timeout)
                times.append(time.perf_counter() - started)
                if rep == 0:
                    outcome = judge(result, pair)
                if result is Distinction.TIMED_OUT:
                    outcome = Outcome.TIMED_OUT
                    break
        except Exception:  # noqa: BLE001
            _LOGGER.exception("%s crashed on pair %s", method, pair.pair_id)
            outcome = Outcome.INCORRECT
        seconds = float(np.median(times)) if times else 0.0
        _LOGGER.debug("%s on %s: %s in %.4fs", method, pair.pair_id, outcome, seconds)
        return BenchRecord(method, pair.r, pair.n, pair.pair_id, outcome, seconds)

    def run(self) -> list[BenchRecord]:
        pairs = self.dataset.labeled_pairs(require_verified=False)
        jobs = [(method, pair) for pair in pairs for method in self.methods]
        _LOGGER.info(
            "Benchmarking %d methods on %d pairs with %d workers",
            len(self.methods), len(pairs), 1 if self.settings.serial else self.settings.workers,
        )
        if self.settings.serial or self.settings.workers <= 1:
            records = [self._run_one(m, p) for m, p in jobs]
        else:
            with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
                records = list(pool.map(lambda job: self._run_one(*job), jobs))
        return sort_records(records)


def _method_rank(method: str) -> int:
    return METHOD_OPTIONS.index(method) if method in METHOD_OPTIONS else len(METHOD_OPTIONS)


def sort_records(records: Sequence[BenchRecord]) -> list[BenchRecord]:
    return sorted(records, key=lambda rec: (_method_rank(rec.method), rec.method, rec.r, rec.n, rec.pair_id))


# -- aggregation ----------------------------------------------------------------


class CellSummary(BaseModel):
    method: str
    r: int
    n: int
    pairs: int
    correct: int
    timed_out: int
    accuracy: float
    mean_seconds: float


class GrowthFit(BaseModel):
    """Least-squares ``seconds = slope * n + intercept`` and the log-log slope."""

    method: str
    r: int
    slope: float
    intercept: float
    r_squared: float
    loglog_slope: float | None = None


class BenchReport(BaseModel):
    config: dict[str, Any]
    cells: list[CellSummary]
    fits: list[GrowthFit]


def summarize(records: Sequence[BenchRecord]) -> list[CellSummary]:
    """Per (method, r, N) accuracy and mean time; timed-out records count as incorrect."""
    cells: dict[tuple[str, int, int], list[BenchRecord]] = defaultdict(list)
    for rec in records:
        cells[rec.method, rec.r, rec.n].append(rec)
    summary = []
    for (method, r, n), recs in cells.items():
        correct = sum(rec.outcome is Outcome.CORRECT for rec in recs)
        summary.append(
            CellSummary(
                method=method,
                r=r,
                n=n,
                pairs=len(recs),
                correct=correct,
                timed_out=sum(rec.outcome is Outcome.TIMED_OUT for rec in recs),
                accuracy=float(Fraction(correct, len(recs))),
                mean_seconds=float(np.mean([rec.seconds for rec in recs])),
            )
        )
    return sorted(summary, key=lambda c: (_method_rank(c.method), c.method, c.r, c.n))


def fit_growth(cells: Sequence[CellSummary]) -> list[GrowthFit]:
    series: dict[tuple[str, int], list[CellSummary]] = defaultdict(list)
    for cell in cells:
        series[cell.method, cell.r].append(cell)
    fits = []
    for (method, r), group in series.items():
        if len({c.n for c in group}) < 2:
            continue
        n = np.array([c.n for c in group], dtype=float)
        t = np.array([c.mean_seconds for c in group], dtype=float)
        slope, intercept = np.polyfit(n, t, 1)
        residual = t - (slope * n + intercept)
        spread = float(np.sum((t - t.mean()) ** 2))
        r_squared = 1.0 - float(np.sum(residual**2)) / spread if spread > 0 else 1.0
        loglog = None
        if np.all(t > 0):
            loglog = float(np.polyfit(np.log(n), np.log(t), 1)[0])
        fits.append(
            GrowthFit(
                method=method, r=r, slope=float(slope), intercept=float(intercept),
                r_squared=r_squared, loglog_slope=loglog,
            )
        )
    return fits


def build_report(settings: BenchSettings, records: Sequence[BenchRecord], **extra: Any) -> BenchReport:
    cells = summarize(records)
    config = {
        "methods": list(settings.methods),
        "timeouts": {str(r): t for r, t in settings.timeouts.items()},
        "timeout_override": settings.timeout_override,
        "repetitions": settings.repetitions,
        "repeat_up_to_n": settings.repeat_up_to_n,
        "seed": settings.seed,
        **extra,
    }
    return BenchReport(config=config, cells=cells, fits=fit_growth(cells))


# -- output files -----------------------------------------------------------------

RECORD_COLUMNS = ["method", "r", "N", "pair_id", "outcome", "seconds"]


def write_records_csv(records: Sequence[BenchRecord], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rec in sort_records(records):
            writer.writerow(
                {
                    "method": rec.method,
                    "r": rec.r,
                    "N": rec.n,
                    "pair_id": rec.pair_id,
                    "outcome": str(rec.outcome),
                    "seconds": f"{rec.seconds:.6f}",
                }
            )


def write_summary_csv(cells: Sequence[CellSummary], path: str | Path) -> None:
    fields = list(CellSummary.model_fields)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for cell in cells:
            writer.writerow(cell.model_dump())


def table_rows(cells: Sequence[CellSummary], r: int) -> tuple[list[str], list[list[Any]]]:
    """One row per method, ``time_N`` and ``accuracy_N`` columns for each N, for degree ``r``."""
    sizes = sorted({c.n for c in cells if c.r == r})
    header = ["method"] + [f"{kind}_{n}" for n in sizes for kind in ("time", "accuracy")]
    by_method: dict[str, dict[int, CellSummary]] = defaultdict(dict)
    for c in cells:
        if c.r == r:
            by_method[c.method][c.n] = c
    rows = []
    for method in sorted(by_method, key=lambda m: (_method_rank(m), m)):
        row: list[Any] = [method]
        for n in sizes:
            cell = by_method[method].get(n)
            row += [f"{cell.mean_seconds:.4f}", f"{cell.accuracy:.3f}"] if cell else ["", ""]
        rows.append(row)
    return header, rows


def write_table_csv(cells: Sequence[CellSummary], r: int, path: str | Path) -> None:
    header, rows = table_rows(cells, r)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_outputs(report: BenchReport, records: Sequence[BenchRecord], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "records.csv", out / "summary.csv"]
    write_records_csv(records, written[0])
    write_summary_csv(report.cells, written[1])
    for r in sorted({c.r for c in report.cells}):
        path = out / f"table_r{r}.csv"
        write_table_csv(report.cells, r, path)
        written.append(path)
    report_path = out / "report.json"
    report_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    written.append(report_path)
    _LOGGER.info("Wrote %d bench files to %s", len(written), out)
    return written
