"""Command-line pipeline: ingest -> canonicalize -> build-graph ->
split -> analyze / eval -> export.

Every subcommand reads one or more input files and writes its artifacts
into an output directory (``--out``, overridden by the ``CLAIMFLOW_OUT``
environment variable when set).  Inputs are never modified; outputs are
written atomically (temp file + rename) so an interrupted run leaves no
partial artifact behind.

Exit codes: 0 success, 1 data or validation error, 2 usage or key
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .canonicalize import (
    DEFAULT_TAU,
    canonicalize_corpus,
    load_embeddings,
    save_mapping,
)
from .claim_graph import build_graph, load_graph, save_graph
from .corpus import (
    drop_violating_records,
    load_corpus,
    restrict_citations,
    save_corpus,
    validate_corpus,
)
from .errors import ClaimflowError, KeyMismatchError
from .evaluation import (
    SPLITS,
    load_predictions,
    load_split,
    macro_prf,
    save_split,
    split_edges,
    stratified_split,
)
from .reports import METRIC_NAMES, build_report

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _tau_value(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(
            f"tau must be in (0, 1], got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimflow",
        description="Claim-graph construction and longitudinal analytics "
                    "over scientific citation corpora.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True,
                       help="primary input file for this stage")
        p.add_argument("--out", default=None,
                       help="output directory (CLAIMFLOW_OUT overrides)")

    p = sub.add_parser("ingest",
                       help="validate a corpus bundle and write its "
                            "normalized form")
    common(p)
    p.add_argument("--lenient", action="store_true",
                   help="drop violating records instead of failing")

    p = sub.add_parser("canonicalize",
                       help="merge near-duplicate claims within papers")
    common(p)
    p.add_argument("--embeddings", required=True,
                   help="embedding file covering every claim id")
    p.add_argument("--tau", type=_tau_value, default=DEFAULT_TAU,
                   help="cosine similarity threshold (default 0.90)")

    p = sub.add_parser("build-graph",
                       help="construct the claim graph bundle from a corpus")
    common(p)

    p = sub.add_parser("split",
                       help="label-stratified paper split into "
                            "train/validation/test")
    common(p)
    p.add_argument("--seed", type=int, default=42,
                   help="tie-break seed (default 42)")

    p = sub.add_parser("analyze",
                       help="compute metric reports over a graph bundle")
    common(p)
    p.add_argument("--metrics", action="append", default=None,
                   help="comma-separated metric names (default: all)")
    p.add_argument("--labels", choices=("all", "substantive"), default="all",
                   help="edge filter for label-sensitive metrics")
    p.add_argument("--horizon", type=int, default=None,
                   help="censoring horizon year for reuse-survival")
    p.add_argument("--seed", type=int, default=42,
                   help="community detection seed (default 42)")

    p = sub.add_parser("eval",
                       help="score predictions against gold edges of a split")
    common(p)
    p.add_argument("--split", required=True, help="split assignment file")
    p.add_argument("--pred", required=True, help="prediction file")
    p.add_argument("--subset", choices=SPLITS, default="test",
                   help="which split to score (default test)")

    p = sub.add_parser("export",
                       help="export a graph bundle as plot-ready CSV tables")
    common(p)

    return parser


def _out_dir(args) -> Path:
    configured = os.environ.get("CLAIMFLOW_OUT") or args.out
    if not configured:
        raise UsageError("no output directory: pass --out or set "
                         "CLAIMFLOW_OUT")
    path = Path(configured)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _check_inputs(*paths: str) -> None:
    # path validation happens before any computation starts
    for p in paths:
        if not Path(p).is_file():
            raise FileNotFoundError(f"input file not found: {p}")


class UsageError(Exception):
    pass


def _atomic(path: Path, write_to) -> None:
    """Run ``write_to(temp_path)`` then rename over ``path``."""
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        write_to(tmp)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _atomic_text(path: Path, text: str) -> None:
    _atomic(path, lambda tmp: tmp.write_text(text, encoding="utf-8"))


def cmd_ingest(args) -> int:
    _check_inputs(args.input)
    out = _out_dir(args)
    corpus = load_corpus(args.input)
    restriction = restrict_citations(corpus)
    corpus = restriction.corpus
    if restriction.dropped_contexts or restriction.dropped_edges:
        print(f"restricted to in-corpus citations: dropped "
              f"{restriction.dropped_contexts} contexts, "
              f"{restriction.dropped_edges} edges")
    report = validate_corpus(corpus)
    dropped = 0
    if not report.empty and args.lenient:
        for v in report.violations:
            print(f"dropped record {v.record_number} ({v.kind}): "
                  f"{v.message}")
        corpus = drop_violating_records(corpus, report)
        dropped = len(report.violations)
        report = validate_corpus(corpus)
    _atomic_text(out / "validation.json",
                 json.dumps(report.to_dict(), indent=2, sort_keys=True)
                 + "\n")
    if not report.empty:
        for v in report.violations:
            print(f"violation ({v.kind}) record {v.record_number}: "
                  f"{v.message}", file=sys.stderr)
        print(f"{len(report.violations)} violations", file=sys.stderr)
        return EXIT_DATA
    _atomic(out / "corpus.jsonl", lambda tmp: save_corpus(corpus, tmp))
    print(f"{len(corpus.papers)} papers, {len(corpus.claims)} claims, "
          f"{len(corpus.contexts)} contexts, {len(corpus.edges)} edges")
    suffix = f" ({dropped} records dropped)" if dropped else ""
    print(f"0 violations{suffix}")
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    _check_inputs(args.input, args.embeddings)
    out = _out_dir(args)
    corpus = load_corpus(args.input)
    table = load_embeddings(args.embeddings)
    result = canonicalize_corpus(corpus, table, tau=args.tau)
    _atomic(out / "canonical.jsonl",
            lambda tmp: save_corpus(result.corpus, tmp))
    _atomic(out / "mapping.jsonl",
            lambda tmp: save_mapping(result.mapping, tmp))
    _atomic_text(out / "canonicalize_summary.json",
                 json.dumps(result.summary, indent=2, sort_keys=True) + "\n")
    s = result.summary
    print(f"claims: {s['claims_before']} -> {s['claims_after']} "
          f"({s['reduction_pct']:.1f}% merged away)")
    print(f"clusters: {s['clusters']} total, {s['multi_member_clusters']} "
          f"multi-member, mean size {s['mean_cluster_size_multi']:.2f} "
          f"over merged clusters")
    print(f"edges: {s['edges_before']} -> {s['edges_after']}")
    return EXIT_OK


def cmd_build_graph(args) -> int:
    _check_inputs(args.input)
    out = _out_dir(args)
    corpus = load_corpus(args.input)
    graph = build_graph(corpus)
    _atomic(out / "graph.jsonl", lambda tmp: save_graph(graph, tmp))
    print(f"{graph.node_count} nodes, {graph.edge_count} edges, "
          f"{len(graph.papers)} papers")
    return EXIT_OK


def cmd_split(args) -> int:
    _check_inputs(args.input)
    out = _out_dir(args)
    corpus = load_corpus(args.input)
    assignment = stratified_split(corpus, seed=args.seed)
    _atomic(out / "split.json", lambda tmp: save_split(assignment, tmp))
    sizes = assignment.sizes()
    print("\t".join(f"{name}={sizes[name]}" for name in SPLITS))
    return EXIT_OK


def _selected_metrics(args) -> list[str]:
    if args.metrics is None:
        return list(METRIC_NAMES)
    names: list[str] = []
    for chunk in args.metrics:
        names.extend(n for n in chunk.split(",") if n)
    for name in names:
        if name not in METRIC_NAMES:
            raise UsageError(f"unknown metric {name!r}; expected one of "
                             f"{', '.join(METRIC_NAMES)}")
    return names


def cmd_analyze(args) -> int:
    metrics = _selected_metrics(args)  # validate names before touching disk
    _check_inputs(args.input)
    out = _out_dir(args)
    graph = load_graph(args.input)
    for metric in metrics:
        report = build_report(metric, graph, labels=args.labels,
                              horizon=args.horizon, seed=args.seed)
        stem = metric.replace("-", "_")
        _atomic_text(out / f"{stem}.csv", report.to_csv_text())
        _atomic_text(out / f"{stem}.json", report.to_json_text())
        print(f"{metric}: {len(report.rows)} rows")
    return EXIT_OK


def cmd_eval(args) -> int:
    _check_inputs(args.input, args.split, args.pred)
    out = _out_dir(args)
    corpus = load_corpus(args.input)
    assignment = load_split(args.split)
    preds = load_predictions(args.pred)
    gold = split_edges(corpus, assignment, args.subset)
    result = macro_prf(gold, preds)
    _atomic_text(out / "eval.json",
                 json.dumps(result.to_dict(), indent=2, sort_keys=True)
                 + "\n")
    print(f"{result.macro_precision:.3f}\t{result.macro_recall:.3f}"
          f"\t{result.macro_f1:.3f}")
    return EXIT_OK


def cmd_export(args) -> int:
    _check_inputs(args.input)
    out = _out_dir(args)
    graph = load_graph(args.input)
    nodes = ["claim,paper,year"]
    nodes += [f"{n.claim_id},{n.paper_id},{n.year}"
              for n in sorted(graph.nodes.values(),
                              key=lambda n: n.claim_id)]
    edges = ["citing_claim,cited_claim,label,citing_year,cited_year"]
    edges += [f"{e.citing_claim_id},{e.cited_claim_id},{e.label},"
              f"{e.citing_year},{e.cited_year}" for e in graph.edges]
    papers = ["paper,venue,year"]
    papers += [f"{p.paper_id},{p.venue},{p.year}"
               for p in sorted(graph.papers.values(),
                               key=lambda p: p.paper_id)]
    _atomic_text(out / "nodes.csv", "\n".join(nodes) + "\n")
    _atomic_text(out / "edges.csv", "\n".join(edges) + "\n")
    _atomic_text(out / "papers.csv", "\n".join(papers) + "\n")
    print(f"exported {len(nodes) - 1} nodes, {len(edges) - 1} edges, "
          f"{len(papers) - 1} papers")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "canonicalize": cmd_canonicalize,
    "build-graph": cmd_build_graph,
    "split": cmd_split,
    "analyze": cmd_analyze,
    "eval": cmd_eval,
    "export": cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except KeyMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClaimflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
