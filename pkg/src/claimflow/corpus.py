"""Corpus model: typed records, JSONL loading, validation, citation closure.

A corpus bundle is a JSON-lines file whose records carry a ``kind`` field:

    {"kind": "paper",   "id": ..., "title": ..., "venue": ..., "year": ...}
    {"kind": "claim",   "id": ..., "paper": ..., "texts": [...],
                        "canonical": ..., "sections": [...]}
    {"kind": "context", "citing": ..., "cited": ..., "pre": ..., "sent": ...,
                        "post": ...}
    {"kind": "edge",    "citing_claim": ..., "cited_claim": ..., "label": ...,
                        "context_index": ..., "provenance": ...}

Loading is strict about structure (parse errors, missing fields, duplicate
ids, dangling claim and edge references all raise) and permissive about
values; value-level problems such as unknown labels are reported by
:func:`validate_corpus` so callers can choose between failing and dropping
the offending records.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import CorpusLoadError

logger = logging.getLogger(__name__)

# Canonical label order; ties and exports follow this sequence everywhere.
LABELS = ("support", "extend", "qualify", "refute", "background")

SECTION_TAGS = frozenset({"abstract", "introduction", "conclusion", "other"})

PROVENANCE_KINDS = ("gold", "predicted")


@dataclass(frozen=True)
class Paper:
    paper_id: str
    title: str
    venue: str
    year: int


@dataclass(frozen=True)
class Claim:
    """One canonical claim owned by a single paper.

    ``canonical_edited`` is derived at load time: True when the canonical
    text is not one of the surface texts (a lightly edited form).
    """

    claim_id: str
    paper_id: str
    surface_texts: tuple[str, ...]
    canonical_text: str
    section_tags: tuple[str, ...]
    canonical_edited: bool = False


@dataclass(frozen=True)
class CitationContext:
    """Three-sentence window around a citation marker.

    ``preceding`` and ``following`` may be empty at document boundaries;
    the marker sentence itself must be non-empty for a valid corpus.
    """

    citing_paper_id: str
    cited_paper_id: str
    preceding: str
    marker: str
    following: str


@dataclass(frozen=True)
class RelationEdge:
    """Directed claim-level relation, citing claim -> cited claim.

    ``year`` is the citing paper's year, denormalized at load so that
    temporal operations never need to re-resolve it.  ``context_index``
    is positional within the owning corpus' context list.
    """

    citing_claim_id: str
    cited_claim_id: str
    label: str
    context_index: int
    provenance: str
    year: int


@dataclass
class Corpus:
    """In-memory corpus.  Treated as immutable after construction; every
    transformation returns a new instance."""

    papers: dict[str, Paper]
    claims: dict[str, Claim]
    contexts: list[CitationContext]
    edges: list[RelationEdge]
    # record locus ("paper:<id>", "context:<pos>", ...) -> 1-based record number
    locus: dict[str, int] = field(default_factory=dict, compare=False)

    def claims_of_paper(self, paper_id: str) -> list[Claim]:
        return [c for c in self.claims.values() if c.paper_id == paper_id]

    def counts(self) -> dict[str, int]:
        return {
            "papers": len(self.papers),
            "claims": len(self.claims),
            "contexts": len(self.contexts),
            "edges": len(self.edges),
        }


@dataclass(frozen=True)
class Violation:
    kind: str
    locus: str
    record_number: int
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "valid": self.empty,
            "violation_count": len(self.violations),
            "violations": [
                {
                    "kind": v.kind,
                    "locus": v.locus,
                    "record": v.record_number,
                    "message": v.message,
                }
                for v in self.violations
            ],
        }


@dataclass(frozen=True)
class RestrictionResult:
    corpus: "Corpus"
    dropped_contexts: int
    dropped_edges: int


def _require(record: dict, key: str, types, num: int):
    if key not in record:
        raise CorpusLoadError(f"missing field '{key}'", num)
    value = record[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise CorpusLoadError(f"field '{key}' has wrong type", num)
    return value


def _string_list(record: dict, key: str, num: int) -> tuple[str, ...]:
    value = _require(record, key, list, num)
    for item in value:
        if not isinstance(item, str):
            raise CorpusLoadError(f"field '{key}' must hold strings", num)
    return tuple(value)


def load_corpus(source: str | Path | Iterable[str]) -> Corpus:
    """Parse a JSONL bundle into a :class:`Corpus`.

    ``source`` is a path or an iterable of lines.  Raises
    :class:`CorpusLoadError` with the offending 1-based record number on
    malformed records, duplicate ids, or dangling claim/edge references.
    Contexts may reference papers outside the corpus; use
    :func:`restrict_citations` to drop them.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)

    papers: dict[str, Paper] = {}
    claims: dict[str, Claim] = {}
    # raw tuples until referential checks can run
    raw_claims: list[tuple[dict, int]] = []
    raw_contexts: list[tuple[dict, int]] = []
    raw_edges: list[tuple[dict, int]] = []
    locus: dict[str, int] = {}

    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON ({exc.msg})", num) from exc
        if not isinstance(record, dict):
            raise CorpusLoadError("record is not an object", num)
        kind = record.get("kind")
        if kind == "paper":
            pid = _require(record, "id", str, num)
            if pid in papers:
                raise CorpusLoadError(f"duplicate paper id '{pid}'", num)
            papers[pid] = Paper(
                paper_id=pid,
                title=_require(record, "title", str, num),
                venue=_require(record, "venue", str, num),
                year=_require(record, "year", int, num),
            )
            locus[f"paper:{pid}"] = num
        elif kind == "claim":
            raw_claims.append((record, num))
        elif kind == "context":
            raw_contexts.append((record, num))
        elif kind == "edge":
            raw_edges.append((record, num))
        else:
            raise CorpusLoadError(f"unknown record kind {kind!r}", num)

    for record, num in raw_claims:
        cid = _require(record, "id", str, num)
        if cid in claims:
            raise CorpusLoadError(f"duplicate claim id '{cid}'", num)
        paper_id = _require(record, "paper", str, num)
        if paper_id not in papers:
            raise CorpusLoadError(
                f"claim '{cid}' references unknown paper '{paper_id}'", num
            )
        texts = _string_list(record, "texts", num)
        canonical = _require(record, "canonical", str, num)
        claims[cid] = Claim(
            claim_id=cid,
            paper_id=paper_id,
            surface_texts=texts,
            canonical_text=canonical,
            section_tags=_string_list(record, "sections", num),
            canonical_edited=canonical not in texts,
        )
        locus[f"claim:{cid}"] = num

    contexts: list[CitationContext] = []
    for pos, (record, num) in enumerate(raw_contexts):
        contexts.append(
            CitationContext(
                citing_paper_id=_require(record, "citing", str, num),
                cited_paper_id=_require(record, "cited", str, num),
                preceding=_require(record, "pre", str, num),
                marker=_require(record, "sent", str, num),
                following=_require(record, "post", str, num),
            )
        )
        locus[f"context:{pos}"] = num

    edges: list[RelationEdge] = []
    for pos, (record, num) in enumerate(raw_edges):
        citing = _require(record, "citing_claim", str, num)
        cited = _require(record, "cited_claim", str, num)
        for cid in (citing, cited):
            if cid not in claims:
                raise CorpusLoadError(
                    f"edge references unknown claim id '{cid}'", num
                )
        index = _require(record, "context_index", int, num)
        if not 0 <= index < len(contexts):
            raise CorpusLoadError(
                f"context_index {index} out of range", num
            )
        edges.append(
            RelationEdge(
                citing_claim_id=citing,
                cited_claim_id=cited,
                label=_require(record, "label", str, num),
                context_index=index,
                provenance=_require(record, "provenance", str, num),
                year=papers[claims[citing].paper_id].year,
            )
        )
        locus[f"edge:{pos}"] = num

    return Corpus(papers=papers, claims=claims, contexts=contexts,
                  edges=edges, locus=locus)


def serialize_corpus(corpus: Corpus) -> str:
    """Canonical JSONL text: papers then claims in ascending id order,
    contexts and edges in list order, compact separators.  Loading the
    result reproduces the corpus exactly (round-trip identity)."""
    out: list[str] = []

    def dump(record: dict) -> None:
        out.append(json.dumps(record, sort_keys=True, separators=(",", ":")))

    for pid in sorted(corpus.papers):
        p = corpus.papers[pid]
        dump({"kind": "paper", "id": p.paper_id, "title": p.title,
              "venue": p.venue, "year": p.year})
    for cid in sorted(corpus.claims):
        c = corpus.claims[cid]
        dump({"kind": "claim", "id": c.claim_id, "paper": c.paper_id,
              "texts": list(c.surface_texts), "canonical": c.canonical_text,
              "sections": list(c.section_tags)})
    for ctx in corpus.contexts:
        dump({"kind": "context", "citing": ctx.citing_paper_id,
              "cited": ctx.cited_paper_id, "pre": ctx.preceding,
              "sent": ctx.marker, "post": ctx.following})
    for e in corpus.edges:
        dump({"kind": "edge", "citing_claim": e.citing_claim_id,
              "cited_claim": e.cited_claim_id, "label": e.label,
              "context_index": e.context_index, "provenance": e.provenance})
    return "\n".join(out) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def corpus_fingerprint(corpus: Corpus) -> str:
    """SHA-256 of the canonical serialization; identical corpora share it."""
    digest = hashlib.sha256(serialize_corpus(corpus).encode("utf-8"))
    return digest.hexdigest()


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """Enumerate every value-level invariant violation with its record locus.

    Checked invariants: positive paper years, labels within the five-way
    scheme, known provenance, non-empty surface texts, non-empty marker
    sentences, known section tags, contexts pairing two distinct in-corpus
    papers, edges connecting claims of different papers, and each edge's
    context matching the papers of its endpoint claims.
    """
    report = ValidationReport()

    def note(kind: str, locus: str, message: str) -> None:
        report.violations.append(
            Violation(kind, locus, corpus.locus.get(locus, -1), message)
        )

    for pid, paper in corpus.papers.items():
        if paper.year <= 0:
            note("bad-year", f"paper:{pid}", f"non-positive year {paper.year}")

    for cid, claim in corpus.claims.items():
        if not claim.surface_texts:
            note("empty-texts", f"claim:{cid}", "claim has no surface texts")
        for tag in claim.section_tags:
            if tag not in SECTION_TAGS:
                note("bad-section", f"claim:{cid}",
                     f"unknown section tag {tag!r}")

    for pos, ctx in enumerate(corpus.contexts):
        locus_key = f"context:{pos}"
        if not ctx.marker.strip():
            note("empty-marker", locus_key, "empty citation marker sentence")
        if ctx.citing_paper_id == ctx.cited_paper_id:
            note("self-citation", locus_key,
                 f"context cites its own paper '{ctx.citing_paper_id}'")
        for side, pid in (("citing", ctx.citing_paper_id),
                          ("cited", ctx.cited_paper_id)):
            if pid not in corpus.papers:
                note("external-paper", locus_key,
                     f"{side} paper '{pid}' is not in the corpus")

    for pos, edge in enumerate(corpus.edges):
        locus_key = f"edge:{pos}"
        if edge.label not in LABELS:
            note("unknown-label", locus_key, f"unknown label {edge.label!r}")
        if edge.provenance not in PROVENANCE_KINDS:
            note("bad-provenance", locus_key,
                 f"unknown provenance {edge.provenance!r}")
        citing_paper = corpus.claims[edge.citing_claim_id].paper_id
        cited_paper = corpus.claims[edge.cited_claim_id].paper_id
        if citing_paper == cited_paper:
            note("same-paper-edge", locus_key,
                 "edge connects two claims of the same paper")
        ctx = corpus.contexts[edge.context_index]
        if (ctx.citing_paper_id, ctx.cited_paper_id) != (citing_paper,
                                                         cited_paper):
            note("context-mismatch", locus_key,
                 "edge context does not pair the claims' papers")

    return report


def restrict_citations(corpus: Corpus) -> RestrictionResult:
    """Drop contexts (and any dependent edges) whose citing or cited paper
    is not in the corpus.  Surviving edges are re-indexed against the
    filtered context list.  Idempotent; never adds records."""
    keep: list[int] = []
    remap: dict[int, int] = {}
    for pos, ctx in enumerate(corpus.contexts):
        if (ctx.citing_paper_id in corpus.papers
                and ctx.cited_paper_id in corpus.papers):
            remap[pos] = len(keep)
            keep.append(pos)

    contexts = [corpus.contexts[pos] for pos in keep]
    edges: list[RelationEdge] = []
    locus = {k: v for k, v in corpus.locus.items()
             if not k.startswith(("context:", "edge:"))}
    for pos in keep:
        locus[f"context:{remap[pos]}"] = corpus.locus.get(f"context:{pos}", -1)

    dropped_edges = 0
    for pos, edge in enumerate(corpus.edges):
        new_index = remap.get(edge.context_index)
        if new_index is None:
            dropped_edges += 1
            continue
        locus[f"edge:{len(edges)}"] = corpus.locus.get(f"edge:{pos}", -1)
        edges.append(RelationEdge(
            citing_claim_id=edge.citing_claim_id,
            cited_claim_id=edge.cited_claim_id,
            label=edge.label,
            context_index=new_index,
            provenance=edge.provenance,
            year=edge.year,
        ))

    dropped_contexts = len(corpus.contexts) - len(contexts)
    if dropped_contexts or dropped_edges:
        logger.info("citation restriction dropped %d contexts, %d edges",
                    dropped_contexts, dropped_edges)
    restricted = Corpus(papers=dict(corpus.papers), claims=dict(corpus.claims),
                        contexts=contexts, edges=edges, locus=locus)
    return RestrictionResult(restricted, dropped_contexts, dropped_edges)


def drop_violating_records(corpus: Corpus,
                           report: ValidationReport) -> Corpus:
    """Lenient-mode cleanup: remove every record named in ``report`` along
    with records that depend on it (a dropped paper takes its claims,
    contexts, and edges; a dropped claim or context takes its edges)."""
    bad_papers = set()
    bad_claims = set()
    bad_contexts = set()
    bad_edges = set()
    for v in report.violations:
        group, _, key = v.locus.partition(":")
        if group == "paper":
            bad_papers.add(key)
        elif group == "claim":
            bad_claims.add(key)
        elif group == "context":
            bad_contexts.add(int(key))
        elif group == "edge":
            bad_edges.add(int(key))

    papers = {pid: p for pid, p in corpus.papers.items()
              if pid not in bad_papers}
    claims = {cid: c for cid, c in corpus.claims.items()
              if cid not in bad_claims and c.paper_id in papers}

    remap: dict[int, int] = {}
    contexts: list[CitationContext] = []
    locus: dict[str, int] = {}
    for pid in papers:
        locus[f"paper:{pid}"] = corpus.locus.get(f"paper:{pid}", -1)
    for cid in claims:
        locus[f"claim:{cid}"] = corpus.locus.get(f"claim:{cid}", -1)
    for pos, ctx in enumerate(corpus.contexts):
        if pos in bad_contexts:
            continue
        if (ctx.citing_paper_id in corpus.papers
                and ctx.citing_paper_id not in papers):
            continue
        if (ctx.cited_paper_id in corpus.papers
                and ctx.cited_paper_id not in papers):
            continue
        remap[pos] = len(contexts)
        locus[f"context:{len(contexts)}"] = corpus.locus.get(
            f"context:{pos}", -1)
        contexts.append(ctx)

    edges: list[RelationEdge] = []
    for pos, edge in enumerate(corpus.edges):
        if pos in bad_edges:
            continue
        if (edge.citing_claim_id not in claims
                or edge.cited_claim_id not in claims):
            continue
        new_index = remap.get(edge.context_index)
        if new_index is None:
            continue
        locus[f"edge:{len(edges)}"] = corpus.locus.get(f"edge:{pos}", -1)
        edges.append(RelationEdge(
            citing_claim_id=edge.citing_claim_id,
            cited_claim_id=edge.cited_claim_id,
            label=edge.label,
            context_index=new_index,
            provenance=edge.provenance,
            year=edge.year,
        ))

    dropped = (len(corpus.papers) - len(papers),
               len(corpus.claims) - len(claims),
               len(corpus.contexts) - len(contexts),
               len(corpus.edges) - len(edges))
    logger.warning("lenient mode dropped %d papers, %d claims, %d contexts, "
                   "%d edges", *dropped)
    return Corpus(papers=papers, claims=claims, contexts=contexts,
                  edges=edges, locus=locus)
