"""Command-line front end: ``regraph {gen,score,select,bench,wl,iso}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import voluptuous as vol
from pydantic import ValidationError
from tabulate import tabulate

from .baselines import exact_isomorphic, wl_test
from .bench import BenchRunner, build_report, table_rows, write_outputs
from .config import resolve_bench_settings, resolve_workers
from .const import (
    CONF_METHODS,
    CONF_REPETITIONS,
    CONF_SEED,
    CONF_SERIAL,
    CONF_TIMEOUT_OVERRIDE,
    CONF_WORKERS,
    DEFAULT_MODEL_SIZE,
    DEFAULT_RETRY_BUDGET,
    DEFAULT_VERIFY_UP_TO,
    DESK_PAIRS,
    DESK_SIZES,
    DOMAIN,
    ENV_LOG_LEVEL,
    FULL_PAIRS,
    FULL_SIZES,
    MANIFEST_FILENAME,
    METHOD_GENEO,
)
from .dataset import DatasetSpec, PairDataset, PairMode, generate_pair_dataset
from .exceptions import ContractViolation, GraphParseError, RegraphError, UnverifiedPairsError
from .graph import read_graph
from .network import (
    CountTable,
    GeneoModel,
    build_score_report,
    calibrate_default_model,
    forward_select,
    score_pair,
    single_accuracies,
)
from .patterns import Pattern, default_roster, load_roster

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def parse_int_list(text: str) -> list[int]:
    """Parse ``"8..40:2"``, ``"50,100,200"``, ``"12"`` or mixes of them; ranges include both ends."""
    values: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                span, _, step = part.partition(":")
                lo, hi = (int(x) for x in span.split(".."))
                stride = int(step) if step else 1
                if stride < 1:
                    raise ValueError
                values.extend(range(lo, hi + 1, stride))
            else:
                values.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--serial", action="store_true", help="run everything on one thread")
    common.add_argument("--timeout-secs", type=float, default=None, help="timeout for every method")
    common.add_argument("--roster", type=Path, default=None, help="pattern roster JSON file")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog=DOMAIN, description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate a pair dataset")
    gen.add_argument("--r", type=parse_int_list, default=[3], help="degrees, e.g. 3 or 3,4,5")
    gen.add_argument("--sizes", type=parse_int_list, default=None, help="e.g. 8..40:2 or 50,100")
    gen.add_argument("--pairs", type=int, default=None, help="pairs per (r, N) cell")
    gen.add_argument("--graphs", type=int, default=10, help="graphs per cell in sample mode")
    gen.add_argument("--mode", choices=[m.value for m in PairMode], default=PairMode.DISTINCT.value)
    gen.add_argument("--verify-up-to", type=int, default=DEFAULT_VERIFY_UP_TO)
    gen.add_argument("--retry-budget", type=int, default=DEFAULT_RETRY_BUDGET)
    gen.add_argument("--full-scale", action="store_true", help="use the large size grid")

    score = sub.add_parser("score", parents=[common], help="score a pair of graph files")
    score.add_argument("graph_a", type=Path)
    score.add_argument("graph_b", type=Path)
    score.add_argument("--model", type=Path, default=None, help="GENEO model file")
    score.add_argument("--t", type=int, default=None, help="use the first t model patterns")
    score.add_argument("--pad", action="store_true", help="pad the smaller graph with isolated nodes")

    select = sub.add_parser("select", parents=[common], help="forward-select a GENEO model")
    select.add_argument("manifest", type=Path)
    select.add_argument("--workers", type=int, default=None)

    bench = sub.add_parser("bench", parents=[common], help="compare methods on a dataset")
    bench.add_argument("manifest", type=Path)
    bench.add_argument("--methods", default=None, help="comma-separated method names")
    bench.add_argument("--model", type=Path, default=None, help="GENEO model file")
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--repetitions", type=int, default=None)

    wl = sub.add_parser("wl", parents=[common], help="run k-WL on a pair of graph files")
    wl.add_argument("graph_a", type=Path)
    wl.add_argument("graph_b", type=Path)
    wl.add_argument("--k", type=int, choices=(1, 2, 3), default=1)

    iso = sub.add_parser("iso", parents=[common], help="exact isomorphism test")
    iso.add_argument("graph_a", type=Path)
    iso.add_argument("graph_b", type=Path)
    return parser


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        name = os.environ.get(ENV_LOG_LEVEL, "warning").upper()
        level = getattr(logging, name, logging.WARNING)
    logging.basicConfig(
        level=level, format="%(asctime)s [%(levelname)s] %(message)s", stream=sys.stderr
    )


def _roster(args: argparse.Namespace) -> list[Pattern]:
    return load_roster(args.roster) if args.roster else default_roster()


def _emit(payload: Any, fmt: str, header: Sequence[str] = (), rows: Sequence[Sequence[Any]] = ()) -> None:
    if fmt == "json":
        text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
        print(text)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        print(buf.getvalue(), end="")
    else:
        print(tabulate(rows, headers=list(header)))


# -- subcommands ------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    mode = PairMode(args.mode)
    sizes = args.sizes or (FULL_SIZES if args.full_scale else DESK_SIZES)
    if mode is PairMode.SAMPLE:
        count = args.graphs
    else:
        count = args.pairs or (FULL_PAIRS if args.full_scale else DESK_PAIRS)
    spec = DatasetSpec(degrees=tuple(args.r), sizes=tuple(sizes), count=count, mode=mode)
    out = args.out or Path("data")
    manifest = generate_pair_dataset(
        spec,
        args.seed or 0,
        out,
        verify_up_to=args.verify_up_to,
        retry_budget=args.retry_budget,
    )
    if manifest.entries:
        print(out / MANIFEST_FILENAME)
    else:
        _LOGGER.warning("Empty grid, nothing written")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    a, b = read_graph(args.graph_a), read_graph(args.graph_b)
    if args.model:
        model = GeneoModel.load(args.model)
        patterns = model.prefix(args.t) if args.t else model.build()
    else:
        patterns = _roster(args)
    report = build_score_report(
        score_pair(a, b, patterns, pad=args.pad), (str(args.graph_a), str(args.graph_b))
    )
    rows = [[p.pattern_id, p.count_a, p.count_b, p.chi, p.chi_decimal] for p in report.patterns]
    if args.format == "json":
        _emit(report.model_dump_json(indent=2), "json")
    else:
        _emit(None, args.format, ["pattern", "count_a", "count_b", "chi", "chi_decimal"], rows)
        if args.format == "table":
            print(f"\naggregated {report.aggregated_decimal}: {report.verdict}"
                  + (f" (witness {report.witness})" if report.witness else ""))
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    dataset = PairDataset.load(args.manifest)
    candidates = _roster(args)
    workers = 1 if args.serial else resolve_workers(args.workers or 0)
    table = CountTable.build(dataset, candidates, workers=workers)
    result = forward_select(candidates, dataset, table=table)
    model = GeneoModel.from_selection(result, source=str(args.manifest))
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        model.save(args.out / "model.json")
        _LOGGER.info("Model written to %s", args.out / "model.json")
    trace = [str(a) for a in result.accuracy_trace]
    if args.format == "json":
        _emit({"chosen": list(result.chosen), "accuracy_trace": trace}, "json")
        return EXIT_OK
    singles = dict(single_accuracies(candidates, dataset, table=table))
    rows = [
        [step, label, f"{float(acc):.3f}", f"{float(singles[label]):.3f}"]
        for step, (label, acc) in enumerate(zip(result.chosen, result.accuracy_trace), start=1)
    ]
    _emit(None, args.format, ["step", "pattern", "accuracy", "alone"], rows)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    flags = {
        CONF_METHODS: args.methods,
        CONF_TIMEOUT_OVERRIDE: args.timeout_secs,
        CONF_REPETITIONS: args.repetitions,
        CONF_WORKERS: args.workers,
        CONF_SERIAL: args.serial,
        CONF_SEED: args.seed,
    }
    settings = resolve_bench_settings(flags)
    dataset = PairDataset.load(args.manifest)
    model = None
    if any(m in METHOD_GENEO for m in settings.methods):
        if args.model:
            model = GeneoModel.load(args.model)
        else:
            model = calibrate_default_model(_roster(args), workers=settings.workers)
            _LOGGER.info("Calibrated model: %s", [p.label for p in model.patterns[:DEFAULT_MODEL_SIZE]])
    records = BenchRunner(settings, dataset, model).run()
    report = build_report(settings, records, manifest=str(args.manifest))
    write_outputs(report, records, args.out or Path("bench-out"))
    if args.format == "json":
        _emit(report.model_dump_json(indent=2), "json")
        return EXIT_OK
    for r in sorted({c.r for c in report.cells}):
        header, rows = table_rows(report.cells, r)
        if args.format == "table":
            print(f"r = {r}")
        _emit(None, args.format, header, rows)
    return EXIT_OK


def cmd_wl(args: argparse.Namespace) -> int:
    a, b = read_graph(args.graph_a), read_graph(args.graph_b)
    result = wl_test(a, b, args.k, args.timeout_secs)
    if args.format == "json":
        _emit({"k": args.k, "result": str(result)}, "json")
    else:
        print(result)
    return EXIT_OK


def cmd_iso(args: argparse.Namespace) -> int:
    a, b = read_graph(args.graph_a), read_graph(args.graph_b)
    result = exact_isomorphic(a, b, args.timeout_secs)
    mapping = list(result.mapping.sigma) if result.mapping else None
    if args.format == "json":
        _emit({"status": str(result.status), "mapping": mapping}, "json")
    else:
        print(result.status)
        if mapping is not None:
            print(" ".join(map(str, mapping)))
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "score": cmd_score,
    "select": cmd_select,
    "bench": cmd_bench,
    "wl": cmd_wl,
    "iso": cmd_iso,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except UnverifiedPairsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except (ContractViolation, GraphParseError, UnicodeDecodeError, vol.Invalid, ValidationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (RegraphError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
