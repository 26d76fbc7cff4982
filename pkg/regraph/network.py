"""Pairwise difference operators, non-isomorphism scores and forward selection.

For a pattern with normalization C, the difference operator on a pair of
hosts is half the absolute difference of their operator values, so its
norm is ``|raw_a - raw_b| / (2 C)``. A model is an ordered list of patterns
aggregated by the maximum. Decisions compare raw integer counts; the
rational scores are display data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from enum import StrEnum
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, Field

from .const import (
    CALIBRATION_DEGREES,
    CALIBRATION_GRAPHS_PER_CELL,
    CALIBRATION_MAX_K,
    CALIBRATION_SEED,
    CALIBRATION_SIZES,
    CHI_DISPLAY_DIGITS,
)
from .dataset import DatasetSpec, LabeledPair, PairDataset, PairMode, build_dataset
from .deadline import Deadline
from .embedding import EmbeddingCount, count_strict_embeddings_anchored
from .exceptions import ContractViolation
from .graph import Graph, pad_graph
from .patterns import NormalizationConstant, Pattern, PatternSpec, default_roster, normalization

_LOGGER = logging.getLogger(__name__)


class Decision(StrEnum):
    NON_ISOMORPHIC = "non-isomorphic"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ScoreVector:
    """Per-pattern scores of one pair.

    ``c_hats[j]`` is None when the pattern has more nodes than the hosts;
    both counts are then zero and so is ``chi[j]``.
    """

    pattern_ids: tuple[str, ...]
    counts_a: tuple[EmbeddingCount, ...]
    counts_b: tuple[EmbeddingCount, ...]
    c_hats: tuple[NormalizationConstant | None, ...]
    chi: tuple[Fraction, ...]

    @property
    def aggregated(self) -> Fraction:
        return max(self.chi, default=Fraction(0))

    @property
    def differs(self) -> bool:
        return any(a.raw != b.raw for a, b in zip(self.counts_a, self.counts_b))


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    witness: str | None = None


def _chi(raw_a: int, raw_b: int, c_hat: NormalizationConstant | None) -> Fraction:
    if c_hat is None:
        return Fraction(0)
    return Fraction(abs(raw_a - raw_b), 2 * c_hat.value)


def score_pair(
    a: Graph,
    b: Graph,
    patterns: Sequence[Pattern],
    *,
    pad: bool = False,
    deadline: Deadline | None = None,
) -> ScoreVector:
    """Score a pair of equally sized graphs against ``patterns``.

    With ``pad=True`` the smaller graph gets isolated nodes first.
    """
    if a.n != b.n:
        if not pad:
            raise ContractViolation(f"graphs have different sizes ({a.n} vs {b.n}); pass pad=True")
        n = max(a.n, b.n)
        a, b = pad_graph(a, n), pad_graph(b, n)
    counts_a, counts_b, c_hats, chi = [], [], [], []
    for p in patterns:
        ca = count_strict_embeddings_anchored(a, p, deadline)
        cb = count_strict_embeddings_anchored(b, p, deadline)
        c_hat = normalization(p, a.n) if p.k <= a.n else None
        counts_a.append(ca)
        counts_b.append(cb)
        c_hats.append(c_hat)
        chi.append(_chi(ca.raw, cb.raw, c_hat))
    return ScoreVector(
        pattern_ids=tuple(p.label for p in patterns),
        counts_a=tuple(counts_a),
        counts_b=tuple(counts_b),
        c_hats=tuple(c_hats),
        chi=tuple(chi),
    )


def verdict(v: ScoreVector) -> Verdict:
    """Non-isomorphic iff some count pair differs; never claims isomorphism."""
    if not v.differs:
        return Verdict(Decision.INCONCLUSIVE)
    best = max(range(len(v.chi)), key=lambda j: (v.chi[j], -j))
    return Verdict(Decision.NON_ISOMORPHIC, v.pattern_ids[best])


# -- accuracy and forward selection -------------------------------------------


@dataclass
class CountTable:
    """Raw strict-embedding counts per (graph id, pattern label) for a dataset.

    Each pattern reduces to a bitmask over the pairs whose counts differ,
    so the prediction of a max-aggregated model is the OR of its masks.
    """

    pairs: list[LabeledPair]
    patterns: list[Pattern]
    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        dataset: PairDataset,
        patterns: Sequence[Pattern],
        *,
        workers: int = 1,
    ) -> CountTable:
        labels = [p.label for p in patterns]
        if len(set(labels)) != len(labels):
            raise ContractViolation("pattern labels must be unique")
        pairs = dataset.labeled_pairs(require_verified=True)
        for pair in pairs:
            if pair.a.n != pair.b.n:
                raise ContractViolation(f"pair {pair.pair_id} has graphs of different sizes")
        table = cls(pairs=pairs, patterns=list(patterns))
        graphs: dict[str, Graph] = {}
        for pair in pairs:
            graphs.setdefault(pair.a_id, pair.a)
            graphs.setdefault(pair.b_id, pair.b)
        jobs = [(gid, p) for gid in graphs for p in patterns]

        def _count(job: tuple[str, Pattern]) -> int:
            gid, p = job
            return count_strict_embeddings_anchored(graphs[gid], p).raw

        if workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                raws = list(pool.map(_count, jobs))
        else:
            raws = [_count(job) for job in jobs]
        for (gid, p), raw in zip(jobs, raws):
            table.counts[gid, p.label] = raw
        _LOGGER.info("Counted %d patterns in %d graphs", len(patterns), len(graphs))
        return table

    @property
    def truth_mask(self) -> int:
        return sum(1 << i for i, pair in enumerate(self.pairs) if pair.non_isomorphic)

    def differ_mask(self, p: Pattern) -> int:
        mask = 0
        for i, pair in enumerate(self.pairs):
            if self.counts[pair.a_id, p.label] != self.counts[pair.b_id, p.label]:
                mask |= 1 << i
        return mask

    def accuracy_of_mask(self, predicted: int) -> Fraction:
        total = len(self.pairs)
        if not total:
            return Fraction(1)
        wrong = (predicted ^ self.truth_mask).bit_count()
        return Fraction(total - wrong, total)


def accuracy(
    model_patterns: Sequence[Pattern],
    dataset: PairDataset,
    *,
    table: CountTable | None = None,
) -> Fraction:
    """Share of pairs where (aggregated score > 0) matches (pair is non-isomorphic).

    Raises UnverifiedPairsError if some pair has no verified ground truth.
    An empty dataset has accuracy 1.
    """
    table = table or CountTable.build(dataset, model_patterns)
    predicted = 0
    for p in model_patterns:
        predicted |= table.differ_mask(p)
    return table.accuracy_of_mask(predicted)


def single_accuracies(
    candidates: Sequence[Pattern],
    dataset: PairDataset,
    *,
    table: CountTable | None = None,
) -> list[tuple[str, Fraction]]:
    table = table or CountTable.build(dataset, candidates)
    return [(p.label, table.accuracy_of_mask(table.differ_mask(p))) for p in candidates]


@dataclass(frozen=True)
class SelectionResult:
    chosen: tuple[str, ...]
    accuracy_trace: tuple[Fraction, ...]
    patterns: tuple[Pattern, ...] = ()

    @property
    def accuracy(self) -> Fraction:
        return self.accuracy_trace[-1] if self.accuracy_trace else Fraction(0)


def forward_select(
    candidates: Sequence[Pattern],
    dataset: PairDataset,
    *,
    table: CountTable | None = None,
    workers: int = 1,
) -> SelectionResult:
    """Greedy forward selection of patterns for the max-aggregated model.

    The best single pattern is always taken; afterwards a candidate is added
    only if it strictly improves accuracy. Ties go to the lowest index.
    """
    if not candidates:
        raise ContractViolation("forward selection needs at least one candidate")
    table = table or CountTable.build(dataset, candidates, workers=workers)
    masks = [table.differ_mask(p) for p in candidates]
    chosen: list[int] = []
    trace: list[Fraction] = []
    predicted = 0
    while len(chosen) < len(candidates):
        best_idx, best_acc = -1, Fraction(-1)
        for i, mask in enumerate(masks):
            if i in chosen:
                continue
            acc = table.accuracy_of_mask(predicted | mask)
            if acc > best_acc:
                best_idx, best_acc = i, acc
        if trace and best_acc <= trace[-1]:
            break
        chosen.append(best_idx)
        trace.append(best_acc)
        predicted |= masks[best_idx]
        _LOGGER.info(
            "Selection step %d: %s, accuracy %s (%.3f)",
            len(chosen), candidates[best_idx].label, best_acc, float(best_acc),
        )
    return SelectionResult(
        chosen=tuple(candidates[i].label for i in chosen),
        accuracy_trace=tuple(trace),
        patterns=tuple(candidates[i] for i in chosen),
    )


# -- model files ----------------------------------------------------------------


class GeneoModel(BaseModel):
    """Patterns in selection order; the first t of them form the GENEO-t model."""

    patterns: list[PatternSpec] = Field(min_length=1)
    accuracy_trace: list[float] = Field(default_factory=list)
    source: str | None = None

    @classmethod
    def from_selection(cls, result: SelectionResult, source: str | None = None) -> GeneoModel:
        return cls(
            patterns=[PatternSpec.of(p) for p in result.patterns],
            accuracy_trace=[float(a) for a in result.accuracy_trace],
            source=source,
        )

    def build(self) -> list[Pattern]:
        return [spec.build() for spec in self.patterns]

    def prefix(self, t: int) -> list[Pattern]:
        """GENEO-t patterns; a model shorter than ``t`` is used whole."""
        if t < 1:
            raise ContractViolation(f"model size must be positive, got {t}")
        if t > len(self.patterns):
            _LOGGER.warning(
                "Model has %d patterns, GENEO-%d uses all of them", len(self.patterns), t
            )
        return [spec.build() for spec in self.patterns[:t]]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> GeneoModel:
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def calibrate_default_model(
    roster: Sequence[Pattern] | None = None,
    *,
    seed: int = CALIBRATION_SEED,
    workers: int = 1,
) -> GeneoModel:
    """Select a model on a small sample-mode dataset generated in memory."""
    candidates = [p for p in (roster or default_roster()) if p.k <= CALIBRATION_MAX_K]
    spec = DatasetSpec(
        degrees=tuple(CALIBRATION_DEGREES),
        sizes=tuple(CALIBRATION_SIZES),
        count=CALIBRATION_GRAPHS_PER_CELL,
        mode=PairMode.SAMPLE,
    )
    _LOGGER.info("Calibrating default model on %d candidates", len(candidates))
    dataset = build_dataset(spec, seed, verify_up_to=max(CALIBRATION_SIZES))
    result = forward_select(candidates, dataset, workers=workers)
    return GeneoModel.from_selection(result, source=f"calibration seed={seed}")


# -- reports --------------------------------------------------------------------


def _decimal(value: Fraction, digits: int = CHI_DISPLAY_DIGITS) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


class PatternScore(BaseModel):
    pattern_id: str
    count_a: int
    count_b: int
    chi: str
    chi_decimal: str


class ScoreReport(BaseModel):
    pair: tuple[str, str]
    patterns: list[PatternScore]
    aggregated: str
    aggregated_decimal: str
    verdict: Decision
    witness: str | None = None


def build_score_report(v: ScoreVector, pair: tuple[str, str]) -> ScoreReport:
    decided = verdict(v)
    return ScoreReport(
        pair=pair,
        patterns=[
            PatternScore(
                pattern_id=pid,
                count_a=ca.raw,
                count_b=cb.raw,
                chi=str(chi),
                chi_decimal=_decimal(chi),
            )
            for pid, ca, cb, chi in zip(v.pattern_ids, v.counts_a, v.counts_b, v.chi)
        ],
        aggregated=str(v.aggregated),
        aggregated_decimal=_decimal(v.aggregated),
        verdict=decided.decision,
        witness=decided.witness,
    )
