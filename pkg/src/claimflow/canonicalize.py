"""Within-paper claim deduplication via embedding similarity.

Near-duplicate claim texts inside one paper are clustered with a greedy
single-pass rule and collapsed onto a representative claim; relation
edges are then redirected onto the representatives.  Clustering never
crosses paper boundaries.

The greedy rule, made fully deterministic: iterate claims in ascending
claim_id order; an unassigned claim becomes a new cluster seed; each
later unassigned claim joins the first existing seed whose similarity to
it is at least tau (similarity against the seed only, never against
other members).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Claim, Corpus, RelationEdge
from .errors import ClaimflowError, CorpusLoadError, MissingEmbeddingError

logger = logging.getLogger(__name__)

DEFAULT_TAU = 0.90


@dataclass
class EmbeddingTable:
    """claim_id -> dense vector, all sharing one dimension."""

    vectors: dict[str, np.ndarray]
    dim: int

    @classmethod
    def from_dict(cls, raw: dict[str, Sequence[float]]) -> "EmbeddingTable":
        vectors: dict[str, np.ndarray] = {}
        dim = None
        for cid, vec in raw.items():
            arr = np.asarray(vec, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ClaimflowError(f"embedding for '{cid}' is not a vector")
            if dim is None:
                dim = arr.size
            elif arr.size != dim:
                raise ClaimflowError(
                    f"embedding for '{cid}' has dimension {arr.size}, "
                    f"expected {dim}")
            if not np.any(arr):
                raise ClaimflowError(
                    f"embedding for '{cid}' is all-zero (cosine undefined)")
            vectors[cid] = arr
        return cls(vectors=vectors, dim=dim or 0)

    def __contains__(self, claim_id: str) -> bool:
        return claim_id in self.vectors

    def get(self, claim_id: str) -> np.ndarray:
        try:
            return self.vectors[claim_id]
        except KeyError:
            raise MissingEmbeddingError(
                f"no embedding for claim '{claim_id}'") from None


def load_embeddings(source: str | Path | Iterable[str]) -> EmbeddingTable:
    """Read {kind:"embedding", id, vec:[...]} records from JSONL."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    raw: dict[str, list[float]] = {}
    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON ({exc.msg})", num) from exc
        if record.get("kind") != "embedding":
            raise CorpusLoadError(
                f"unexpected record kind {record.get('kind')!r}", num)
        cid = record.get("id")
        if not isinstance(cid, str):
            raise CorpusLoadError("missing or non-string 'id'", num)
        if cid in raw:
            raise CorpusLoadError(f"duplicate embedding id '{cid}'", num)
        vec = record.get("vec")
        if (not isinstance(vec, list) or not vec
                or not all(isinstance(x, (int, float)) for x in vec)):
            raise CorpusLoadError("field 'vec' must be a non-empty list of "
                                  "numbers", num)
        raw[cid] = vec
    return EmbeddingTable.from_dict(raw)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cid in sorted(table.vectors):
            record = {"kind": "embedding", "id": cid,
                      "vec": [float(x) for x in table.vectors[cid]]}
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ClaimflowError(
            f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ClaimflowError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class ClusterMapping:
    """Idempotent claim -> representative map plus the member lists.

    Representatives map to themselves; every cluster stays inside one
    paper.  ``clusters`` lists members in ascending claim_id order.
    """

    representative: dict[str, str] = field(default_factory=dict)
    clusters: tuple[tuple[str, ...], ...] = ()

    def resolve(self, claim_id: str) -> str:
        return self.representative.get(claim_id, claim_id)

    def merged_pairs(self) -> list[tuple[str, str]]:
        """Non-identity (from, to) pairs, ascending by source id."""
        return sorted((cid, rep) for cid, rep in self.representative.items()
                      if cid != rep)

    def merge(self, other: "ClusterMapping") -> "ClusterMapping":
        overlap = set(self.representative) & set(other.representative)
        if overlap:
            raise ClaimflowError(
                f"cluster mappings overlap on {sorted(overlap)[:3]}")
        return ClusterMapping(
            representative={**self.representative, **other.representative},
            clusters=self.clusters + other.clusters,
        )


def cluster_claims(paper_claims: Sequence[str], emb: EmbeddingTable,
                   tau: float = DEFAULT_TAU) -> ClusterMapping:
    """Greedy seed-attachment clustering of one paper's claims.

    Returns a :class:`ClusterMapping` whose representatives are the
    cluster seeds; callers wanting the longest-text representative apply
    :func:`select_representative` afterwards (see
    :func:`canonicalize_corpus`).
    """
    if not 0.0 < tau <= 1.0:
        raise ClaimflowError(f"tau must lie in (0, 1], got {tau}")
    ordered = sorted(paper_claims)
    seeds: list[str] = []
    members: dict[str, list[str]] = {}
    for cid in ordered:
        vec = emb.get(cid)
        for seed in seeds:
            if cosine_similarity(emb.get(seed), vec) >= tau:
                members[seed].append(cid)
                break
        else:
            seeds.append(cid)
            members[cid] = [cid]
    representative = {cid: seed for seed in seeds for cid in members[seed]}
    clusters = tuple(tuple(members[seed]) for seed in seeds)
    return ClusterMapping(representative=representative, clusters=clusters)


def select_representative(cluster: Sequence[str], corpus: Corpus) -> str:
    """Member with the longest canonical text; ties break toward the
    smallest claim_id in byte order."""
    if not cluster:
        raise ClaimflowError("empty cluster has no representative")
    return min(cluster,
               key=lambda cid: (-len(corpus.claims[cid].canonical_text), cid))


def redirect_edges(corpus: Corpus, mapping: ClusterMapping) -> Corpus:
    """Rewrite edge endpoints onto representatives and drop merged claims.

    Edges whose endpoints collapse onto one claim are removed, and the
    surviving multiset is deduplicated on (citing, cited, label, context).
    Merged claims contribute their surface texts to the representative.
    Applying the same mapping twice is a no-op the second time.
    """
    for source, target in mapping.representative.items():
        if source not in corpus.claims:
            continue  # already merged away; tolerated for idempotence
        if target not in corpus.claims:
            raise ClaimflowError(
                f"mapping sends '{source}' to unknown claim '{target}'")
        if corpus.claims[source].paper_id != corpus.claims[target].paper_id:
            raise ClaimflowError(
                f"mapping crosses paper boundary: '{source}' -> '{target}'")

    # gather surface texts flowing into each representative
    extra_texts: dict[str, list[str]] = {}
    dropped: set[str] = set()
    for cid, claim in corpus.claims.items():
        rep = mapping.resolve(cid)
        if rep == cid:
            continue
        dropped.add(cid)
        bucket = extra_texts.setdefault(rep, [])
        for text in claim.surface_texts:
            bucket.append(text)

    claims: dict[str, Claim] = {}
    for cid, claim in corpus.claims.items():
        if cid in dropped:
            continue
        merged = extra_texts.get(cid)
        if merged:
            texts = list(claim.surface_texts)
            for text in merged:
                if text not in texts:
                    texts.append(text)
            claim = Claim(
                claim_id=claim.claim_id, paper_id=claim.paper_id,
                surface_texts=tuple(texts),
                canonical_text=claim.canonical_text,
                section_tags=claim.section_tags,
                canonical_edited=claim.canonical_edited,
            )
        claims[cid] = claim

    edges: list[RelationEdge] = []
    seen: set[tuple[str, str, str, int]] = set()
    locus = {k: v for k, v in corpus.locus.items()
             if not k.startswith("edge:")}
    for cid in dropped:
        locus.pop(f"claim:{cid}", None)
    for pos, edge in enumerate(corpus.edges):
        citing = mapping.resolve(edge.citing_claim_id)
        cited = mapping.resolve(edge.cited_claim_id)
        if citing == cited:
            continue  # collapsed into a self-edge
        key = (citing, cited, edge.label, edge.context_index)
        if key in seen:
            continue
        seen.add(key)
        locus[f"edge:{len(edges)}"] = corpus.locus.get(f"edge:{pos}", -1)
        edges.append(RelationEdge(
            citing_claim_id=citing, cited_claim_id=cited, label=edge.label,
            context_index=edge.context_index, provenance=edge.provenance,
            year=edge.year,
        ))

    return Corpus(papers=dict(corpus.papers), claims=claims,
                  contexts=list(corpus.contexts), edges=edges, locus=locus)


@dataclass(frozen=True)
class CanonicalizationResult:
    corpus: Corpus
    mapping: ClusterMapping
    summary: dict


def canonicalize_corpus(corpus: Corpus, emb: EmbeddingTable,
                        tau: float = DEFAULT_TAU) -> CanonicalizationResult:
    """Cluster every paper's claims, pick longest-text representatives,
    and redirect edges.  The summary reports the node reduction and the
    mean cluster size under both denominators (all clusters, and only
    clusters that actually merged something)."""
    combined = ClusterMapping()
    for pid in sorted(corpus.papers):
        claim_ids = sorted(c.claim_id for c in corpus.claims.values()
                           if c.paper_id == pid)
        if not claim_ids:
            continue
        combined = combined.merge(cluster_claims(claim_ids, emb, tau))

    # re-point each cluster at its longest-text representative
    representative: dict[str, str] = {}
    for cluster in combined.clusters:
        rep = select_representative(cluster, corpus)
        for cid in cluster:
            representative[cid] = rep
    mapping = ClusterMapping(representative=representative,
                             clusters=combined.clusters)

    before = len(corpus.claims)
    result = redirect_edges(corpus, mapping)
    after = len(result.claims)
    n_clusters = len(mapping.clusters)
    multi = [c for c in mapping.clusters if len(c) > 1]
    summary = {
        "claims_before": before,
        "claims_after": after,
        "merged_away": before - after,
        "reduction_pct": 100.0 * (before - after) / before if before else 0.0,
        "clusters": n_clusters,
        "multi_member_clusters": len(multi),
        "mean_cluster_size_all": before / n_clusters if n_clusters else 0.0,
        "mean_cluster_size_multi": (
            sum(len(c) for c in multi) / len(multi) if multi else 0.0),
        "edges_before": len(corpus.edges),
        "edges_after": len(result.edges),
        "tau": tau,
    }
    logger.info("canonicalization merged %d of %d claims (%.1f%%)",
                summary["merged_away"], before, summary["reduction_pct"])
    return CanonicalizationResult(corpus=result, mapping=mapping,
                                  summary=summary)


def save_mapping(mapping: ClusterMapping, path: str | Path) -> None:
    """Write non-identity merges as {kind:"merge", from, to} records."""
    with open(path, "w", encoding="utf-8") as fh:
        for source, target in mapping.merged_pairs():
            fh.write(json.dumps({"kind": "merge", "from": source,
                                 "to": target},
                                separators=(",", ":")) + "\n")


def load_mapping(source: str | Path | Iterable[str]) -> ClusterMapping:
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    representative: dict[str, str] = {}
    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("kind") != "merge":
            raise CorpusLoadError(
                f"unexpected record kind {record.get('kind')!r}", num)
        source_id, target = record["from"], record["to"]
        representative[source_id] = target
        representative.setdefault(target, target)
    clusters: dict[str, list[str]] = {}
    for cid, rep in representative.items():
        clusters.setdefault(rep, []).append(cid)
    return ClusterMapping(
        representative=representative,
        clusters=tuple(tuple(sorted(m)) for _, m in sorted(clusters.items())),
    )
