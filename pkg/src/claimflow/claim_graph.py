"""Directed claim-claim interaction graph and cumulative year snapshots.

Nodes are claims annotated with their paper and year; edges keep the
relation label and both endpoint years.  Degrees count distinct
neighbor claims, never edge multiplicity, so parallel edges with
different labels contribute once.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import LABELS, Corpus
from .errors import ClaimflowError, CorpusLoadError


@dataclass(frozen=True)
class GraphNode:
    claim_id: str
    paper_id: str
    year: int


@dataclass(frozen=True)
class GraphEdge:
    citing_claim_id: str
    cited_claim_id: str
    label: str
    citing_year: int
    cited_year: int


@dataclass(frozen=True)
class PaperInfo:
    paper_id: str
    venue: str
    year: int


@dataclass
class ClaimGraph:
    """Immutable after construction.  ``papers`` covers every corpus
    paper (cited-only and claimless papers included) so exposure-window
    denominators see the full publication record.  ``snapshot_year`` is
    set on snapshots produced by :func:`snapshot_at`."""

    nodes: dict[str, GraphNode]
    edges: list[GraphEdge]
    papers: dict[str, PaperInfo]
    snapshot_year: int | None = None
    _in: dict[str, list[GraphEdge]] = field(default_factory=dict, repr=False,
                                            compare=False)
    _out: dict[str, list[GraphEdge]] = field(default_factory=dict, repr=False,
                                             compare=False)

    def __post_init__(self):
        for edge in self.edges:
            self._in.setdefault(edge.cited_claim_id, []).append(edge)
            self._out.setdefault(edge.citing_claim_id, []).append(edge)

    def in_edges(self, claim_id: str) -> list[GraphEdge]:
        return self._in.get(claim_id, [])

    def out_edges(self, claim_id: str) -> list[GraphEdge]:
        return self._out.get(claim_id, [])

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def distinct_pairs(self) -> int:
        return len({(e.citing_claim_id, e.cited_claim_id)
                    for e in self.edges})

    def year_range(self) -> tuple[int, int]:
        if not self.nodes:
            raise ClaimflowError("empty graph has no year range")
        years = [n.year for n in self.nodes.values()]
        return min(years), max(years)


def build_graph(corpus: Corpus) -> ClaimGraph:
    """One node per claim, one edge per relation edge, in sorted order.

    Raises on a same-paper edge or an out-of-scheme label; run
    validation (or lenient ingest) first for data you do not trust.
    """
    nodes = {}
    for cid in sorted(corpus.claims):
        claim = corpus.claims[cid]
        nodes[cid] = GraphNode(
            claim_id=cid, paper_id=claim.paper_id,
            year=corpus.papers[claim.paper_id].year,
        )
    edges = []
    for edge in corpus.edges:
        citing = corpus.claims[edge.citing_claim_id]
        cited = corpus.claims[edge.cited_claim_id]
        if citing.paper_id == cited.paper_id:
            raise ClaimflowError(
                f"edge {edge.citing_claim_id} -> {edge.cited_claim_id} "
                "connects claims of the same paper")
        if edge.label not in LABELS:
            raise ClaimflowError(f"unknown edge label {edge.label!r}")
        edges.append(GraphEdge(
            citing_claim_id=edge.citing_claim_id,
            cited_claim_id=edge.cited_claim_id,
            label=edge.label,
            citing_year=corpus.papers[citing.paper_id].year,
            cited_year=corpus.papers[cited.paper_id].year,
        ))
    edges.sort(key=lambda e: (e.citing_claim_id, e.cited_claim_id, e.label,
                              e.citing_year, e.cited_year))
    papers = {pid: PaperInfo(pid, p.venue, p.year)
              for pid, p in sorted(corpus.papers.items())}
    return ClaimGraph(nodes=nodes, edges=edges, papers=papers)


def snapshot_at(graph: ClaimGraph, t: int) -> ClaimGraph:
    """Cumulative snapshot G_t: claims of papers with year <= t and edges
    whose endpoints both lie in V_t.  Cited-later edges (possible in
    unordered data) enter only once both endpoints exist, keeping every
    snapshot internally consistent."""
    nodes = {cid: n for cid, n in graph.nodes.items() if n.year <= t}
    edges = [e for e in graph.edges
             if e.citing_year <= t and e.cited_year <= t]
    papers = {pid: p for pid, p in graph.papers.items() if p.year <= t}
    return ClaimGraph(nodes=nodes, edges=edges, papers=papers,
                      snapshot_year=t)


def degrees(graph: ClaimGraph, h: str) -> tuple[int, int]:
    """(k_in, k_out) distinct-neighbor degrees for claim ``h``."""
    if h not in graph.nodes:
        raise ClaimflowError(f"unknown claim '{h}'")
    k_in = len({e.citing_claim_id for e in graph.in_edges(h)})
    k_out = len({e.cited_claim_id for e in graph.out_edges(h)})
    return k_in, k_out


def all_degrees(graph: ClaimGraph) -> dict[str, tuple[int, int]]:
    return {cid: degrees(graph, cid) for cid in graph.nodes}


def serialize_graph(graph: ClaimGraph) -> str:
    """Canonical JSONL: paper, node, then edge records, each sorted.
    Identical graphs serialize byte-identically."""
    out: list[str] = []

    def dump(record: dict) -> None:
        out.append(json.dumps(record, sort_keys=True, separators=(",", ":")))

    for pid in sorted(graph.papers):
        p = graph.papers[pid]
        dump({"kind": "gpaper", "id": p.paper_id, "venue": p.venue,
              "year": p.year})
    for cid in sorted(graph.nodes):
        n = graph.nodes[cid]
        dump({"kind": "gnode", "claim": n.claim_id, "paper": n.paper_id,
              "year": n.year})
    for e in sorted(graph.edges,
                    key=lambda e: (e.citing_claim_id, e.cited_claim_id,
                                   e.label, e.citing_year, e.cited_year)):
        dump({"kind": "gedge", "citing_claim": e.citing_claim_id,
              "cited_claim": e.cited_claim_id, "label": e.label,
              "citing_year": e.citing_year, "cited_year": e.cited_year})
    return "\n".join(out) + "\n"


def save_graph(graph: ClaimGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_graph(graph), encoding="utf-8")


def graph_fingerprint(graph: ClaimGraph) -> str:
    """SHA-256 over the canonical serialization."""
    return hashlib.sha256(serialize_graph(graph).encode("utf-8")).hexdigest()


def load_graph(source: str | Path | Iterable[str]) -> ClaimGraph:
    """Read a graph bundle written by :func:`save_graph`.

    Edge-list-only files (gedge records alone) are accepted: node and
    paper entries are then reconstructed from the edge endpoints, with
    claim ids doubling as paper ids and venues unknown.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)

    papers: dict[str, PaperInfo] = {}
    nodes: dict[str, GraphNode] = {}
    edges: list[GraphEdge] = []
    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON ({exc.msg})", num) from exc
        kind = record.get("kind")
        if kind == "gpaper":
            papers[record["id"]] = PaperInfo(
                record["id"], record["venue"], record["year"])
        elif kind == "gnode":
            nodes[record["claim"]] = GraphNode(
                record["claim"], record["paper"], record["year"])
        elif kind == "gedge":
            edges.append(GraphEdge(
                citing_claim_id=record["citing_claim"],
                cited_claim_id=record["cited_claim"],
                label=record["label"],
                citing_year=record["citing_year"],
                cited_year=record["cited_year"],
            ))
        else:
            raise CorpusLoadError(f"unknown record kind {kind!r}", num)

    if not nodes:
        for e in edges:
            nodes.setdefault(e.citing_claim_id, GraphNode(
                e.citing_claim_id, e.citing_claim_id, e.citing_year))
            nodes.setdefault(e.cited_claim_id, GraphNode(
                e.cited_claim_id, e.cited_claim_id, e.cited_year))
        nodes = dict(sorted(nodes.items()))
    if not papers:
        seen_papers = sorted({(n.paper_id, n.year)
                              for n in nodes.values()})
        papers = {pid: PaperInfo(pid, "other", year)
                  for pid, year in seen_papers}
    for e in edges:
        for cid in (e.citing_claim_id, e.cited_claim_id):
            if cid not in nodes:
                raise CorpusLoadError(
                    f"edge references unknown claim '{cid}'")
    return ClaimGraph(nodes=nodes, edges=edges, papers=papers)
