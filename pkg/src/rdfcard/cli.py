"""Command-line front end: load data once, estimate or evaluate query files.

Exit codes: 0 success, 1 missing files / bad configuration, 2 when at least
one query failed (the remaining queries are still reported).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .estimator import estimate, evaluate
from .oracle import execute_bgp
from .query_model import PatternShapeError, QueryParseError, parse_query
from .rdf_store import NTriplesParseError, load_ntriples
from .rpt_cardinality import CardinalityCache

CACHE_SIZE_ENV = "PRESTO_CACHE_SIZE"
DEFAULT_CACHE_SIZE = 100_000
DEFAULT_EVICTION_RATE = 0.1


@dataclass
class RunConfig:
    data_path: Path
    query_paths: list[Path] = field(default_factory=list)
    cache_size: int = DEFAULT_CACHE_SIZE
    eviction_rate: float = DEFAULT_EVICTION_RATE
    output: str = "json"
    with_truth: bool = False
    with_distribution: bool = False


class _ConfigError(Exception):
    pass


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        queries = _collect_query_files(args)
    except _ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        graph = load_ntriples(config.data_path.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read data file: {exc}", file=sys.stderr)
        return 1
    except NTriplesParseError as exc:
        print(f"error: {config.data_path}: {exc}", file=sys.stderr)
        return 1
    try:
        cache = CardinalityCache(config.cache_size, config.eviction_rate)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command == "estimate":
        return _cmd_estimate(graph, cache, config, queries)
    return _cmd_evaluate(graph, cache, config, queries)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdfcard",
        description="Cardinality estimation for conjunctive RDF queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("estimate", "Per-query cardinality estimates."),
        ("evaluate", "Estimates plus brute-force truth and correlation."),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--data", required=True, help="N-Triples data file")
        cmd.add_argument(
            "--query", action="append", default=[], help="query file (repeatable)"
        )
        cmd.add_argument("--queries-dir", help="directory of query files")
        cmd.add_argument("--cache-size", type=int, default=None)
        cmd.add_argument("--eviction-rate", type=float, default=DEFAULT_EVICTION_RATE)
        cmd.add_argument("--format", choices=("json", "table"), default="json")
        cmd.add_argument("--with-truth", action="store_true")
        cmd.add_argument("--with-distribution", action="store_true")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cache_size = args.cache_size
    if cache_size is None:
        raw = os.environ.get(CACHE_SIZE_ENV)
        if raw is not None:
            try:
                cache_size = int(raw)
            except ValueError:
                raise _ConfigError(f"{CACHE_SIZE_ENV} must be an integer, got {raw!r}")
        else:
            cache_size = DEFAULT_CACHE_SIZE
    data_path = Path(args.data)
    if not data_path.is_file():
        raise _ConfigError(f"data file not found: {data_path}")
    return RunConfig(
        data_path=data_path,
        cache_size=cache_size,
        eviction_rate=args.eviction_rate,
        output=args.format,
        with_truth=args.with_truth,
        with_distribution=args.with_distribution,
    )


def _collect_query_files(args: argparse.Namespace) -> list[Path]:
    paths = [Path(q) for q in args.query]
    for path in paths:
        if not path.is_file():
            raise _ConfigError(f"query file not found: {path}")
    if args.queries_dir is not None:
        directory = Path(args.queries_dir)
        if not directory.is_dir():
            raise _ConfigError(f"query directory not found: {directory}")
        paths.extend(sorted(p for p in directory.iterdir() if p.is_file()))
    if not paths:
        raise _ConfigError("no queries given (use --query or --queries-dir)")
    return paths


def _parse_query_file(path: Path):
    try:
        return parse_query(path.read_text(encoding="utf-8"))
    except (QueryParseError, PatternShapeError, OSError) as exc:
        return exc


def _cmd_estimate(graph, cache, config: RunConfig, queries: list[Path]) -> int:
    rows = []
    failed = False
    for path in queries:
        qid = path.stem
        parsed = _parse_query_file(path)
        if isinstance(parsed, Exception):
            rows.append({"query_id": qid, "error": str(parsed)})
            failed = True
            continue
        est = estimate(graph, parsed, cache)
        true_card = execute_bgp(graph, parsed) if config.with_truth else None
        rows.append(
            est.to_report(
                qid,
                with_distribution=config.with_distribution,
                true_card=true_card,
            )
        )
    if config.output == "json":
        for row in rows:
            print(json.dumps(row))
    else:
        _print_table(rows)
    return 2 if failed else 0


def _cmd_evaluate(graph, cache, config: RunConfig, queries: list[Path]) -> int:
    parsed = [_parse_query_file(path) for path in queries]
    report = evaluate(
        graph,
        parsed,
        cache,
        query_ids=[path.stem for path in queries],
        with_distribution=config.with_distribution,
    )
    if config.output == "json":
        print(json.dumps(report))
    else:
        _print_table(report["rows"])
        agg = report["aggregate"]
        print(
            f"n={agg['n']} mean_true={agg['mean_true']} "
            f"mean_estimate={agg['mean_estimate']} pearson={agg['pearson']}"
        )
        if "correlation_note" in agg:
            print(f"note: {agg['correlation_note']}")
    skipped = any(row.get("skipped") for row in report["rows"])
    return 2 if skipped else 0


def _print_table(rows: list[dict]) -> None:
    headers = ["query_id", "point", "exact", "mean", "true_card", "m"]
    widths = {h: len(h) for h in headers}
    cells = []
    for row in rows:
        if row.get("skipped") or row.get("error"):
            reason = row.get("reason") or row.get("error")
            cells.append({"query_id": row.get("query_id", "?"), "point": f"skipped: {reason}"})
            continue
        cells.append({h: str(row.get(h, "")) for h in headers})
    for cell in cells:
        for h, value in cell.items():
            widths[h] = max(widths[h], len(str(value)))
    print("  ".join(h.ljust(widths[h]) for h in headers))
    for cell in cells:
        print("  ".join(str(cell.get(h, "")).ljust(widths[h]) for h in headers))


if __name__ == "__main__":
    sys.exit(main())
