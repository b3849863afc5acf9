"""Longitudinal metrics over a claim graph.

Every operation is a pure function of an immutable :class:`ClaimGraph`
(or a snapshot of one).  Quantities defined as ratios of counts are
computed with exact rational arithmetic and converted to float once at
the boundary, so identical inputs always reproduce identical values.

Where a metric counts "engagement" the default includes background
edges; passing ``labels="substantive"`` restricts the count to the four
non-background labels.  Metrics whose definitions name specific labels
(distributions, challenges, uncertainty) take no variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .claim_graph import ClaimGraph, GraphEdge, degrees
from .corpus import Corpus, LABELS
from .errors import ClaimflowError
from .stats import SurvivalInput, spearman

CHALLENGE_LABELS = ("qualify", "refute")

POST_CHALLENGE_CATEGORIES = (
    "no-further-engagement", "background-only",
    "support", "extend", "qualify", "refute",
)

LABEL_VARIANTS = ("all", "substantive")


def _edges(graph: ClaimGraph, labels: str) -> list[GraphEdge]:
    if labels == "all":
        return graph.edges
    if labels == "substantive":
        return [e for e in graph.edges if e.label != "background"]
    raise ClaimflowError(f"unknown label variant {labels!r}")


def _in_edges(graph: ClaimGraph, h: str, labels: str) -> list[GraphEdge]:
    edges = graph.in_edges(h)
    if labels == "substantive":
        return [e for e in edges if e.label != "background"]
    if labels != "all":
        raise ClaimflowError(f"unknown label variant {labels!r}")
    return edges


@dataclass(frozen=True)
class RelationDistribution:
    counts: dict[str, int]
    proportions: dict[str, float]
    total: int


def _distribution(edges: list[GraphEdge]) -> RelationDistribution:
    counts = {label: 0 for label in LABELS}
    for e in edges:
        counts[e.label] += 1
    total = len(edges)
    proportions = {label: (counts[label] / total if total else 0.0)
                   for label in LABELS}
    return RelationDistribution(counts=counts, proportions=proportions,
                                total=total)


def relation_distribution(graph: ClaimGraph) -> RelationDistribution:
    """Per-label proportions over the full edge multiset."""
    if not graph.edges:
        raise ClaimflowError("empty graph: no relation distribution")
    return _distribution(graph.edges)


@dataclass(frozen=True)
class PropagationResult:
    """Distinct citing-paper counts per claim plus corpus summary."""

    per_claim: dict[str, int]
    isolated_fraction: float
    mean: float
    tail_share_ge_10: float
    labels: str


def propagation_counts(graph: ClaimGraph,
                       labels: str = "all") -> PropagationResult:
    per_claim: dict[str, int] = {}
    for cid in sorted(graph.nodes):
        citing_papers = {graph.nodes[e.citing_claim_id].paper_id
                         for e in _in_edges(graph, cid, labels)}
        per_claim[cid] = len(citing_papers)
    n = len(per_claim)
    if n == 0:
        return PropagationResult(per_claim, 0.0, 0.0, 0.0, labels)
    values = list(per_claim.values())
    return PropagationResult(
        per_claim=per_claim,
        isolated_fraction=sum(1 for v in values if v == 0) / n,
        mean=sum(values) / n,
        tail_share_ge_10=sum(1 for v in values if v >= 10) / n,
        labels=labels,
    )


def time_to_first_reuse(graph: ClaimGraph, horizon_year: int | None = None,
                        labels: str = "all") -> SurvivalInput:
    """Per-claim (duration, event) pairs in ascending claim_id order.

    Reused claims get the gap to their first citing paper; unreused
    claims are right-censored at the horizon (default: the latest year
    in the corpus' publication record).
    """
    if not graph.nodes:
        raise ClaimflowError("empty graph: no survival input")
    max_claim_year = max(n.year for n in graph.nodes.values())
    if horizon_year is None:
        horizon_year = max((p.year for p in graph.papers.values()),
                           default=max_claim_year)
    if horizon_year < max_claim_year:
        raise ClaimflowError(
            f"horizon {horizon_year} precedes latest claim year "
            f"{max_claim_year}")
    durations: list[float] = []
    events: list[bool] = []
    for cid in sorted(graph.nodes):
        node = graph.nodes[cid]
        incoming = _in_edges(graph, cid, labels)
        if incoming:
            first = min(e.citing_year for e in incoming)
            durations.append(first - node.year)
            events.append(True)
        else:
            durations.append(horizon_year - node.year)
            events.append(False)
    return SurvivalInput(durations=tuple(durations), events=tuple(events))


@dataclass(frozen=True)
class ChallengeRecord:
    claim_id: str
    challenged: bool
    first_challenge_year: int | None
    time_to_challenge: int | None
    post_challenge_edges: tuple[GraphEdge, ...]


@dataclass(frozen=True)
class ChallengeResult:
    records: tuple[ChallengeRecord, ...]
    challenged_share: float
    qualify_only_share: float
    refute_share: float
    median_time_to_challenge: int | None
    post_challenge_distribution: dict[str, float]


def challenge_analysis(graph: ClaimGraph) -> ChallengeResult:
    """Challenge timing and what happens to a claim afterwards.

    A claim is challenged when it has at least one incoming qualify or
    refute edge.  Post-challenge edges are the incoming edges from years
    strictly after the first challenge year (year granularity leaves
    same-year order unknowable, so same-year companions are excluded).

    The six-way post-challenge distribution first buckets whole claims:
    no-further-engagement (no post-challenge edges) and background-only
    (some, all labeled background).  The rest of the mass is split over
    the four substantive labels proportionally to their share among the
    remaining claims' non-background post-challenge edges.

    ``qualify_only_share`` counts challenged claims never refuted, so it
    and ``refute_share`` partition ``challenged_share``.
    """
    records: list[ChallengeRecord] = []
    for cid in sorted(graph.nodes):
        node = graph.nodes[cid]
        incoming = graph.in_edges(cid)
        challenges = [e for e in incoming if e.label in CHALLENGE_LABELS]
        if not challenges:
            records.append(ChallengeRecord(cid, False, None, None, ()))
            continue
        first_year = min(e.citing_year for e in challenges)
        post = tuple(sorted(
            (e for e in incoming if e.citing_year > first_year),
            key=lambda e: (e.citing_year, e.citing_claim_id, e.label)))
        records.append(ChallengeRecord(
            claim_id=cid, challenged=True, first_challenge_year=first_year,
            time_to_challenge=first_year - node.year,
            post_challenge_edges=post))

    n_claims = len(records)
    challenged = [r for r in records if r.challenged]
    n_ch = len(challenged)
    if n_claims == 0 or n_ch == 0:
        empty = {cat: 0.0 for cat in POST_CHALLENGE_CATEGORIES}
        return ChallengeResult(tuple(records), 0.0, 0.0, 0.0, None, empty)

    refuted = sum(
        1 for r in challenged
        if any(e.label == "refute" for e in graph.in_edges(r.claim_id)))

    times = sorted(r.time_to_challenge for r in challenged)
    median = times[(len(times) - 1) // 2]  # lower median on even length

    no_further = [r for r in challenged if not r.post_challenge_edges]
    background_only = [
        r for r in challenged if r.post_challenge_edges
        and all(e.label == "background" for e in r.post_challenge_edges)]
    settled = {r.claim_id for r in no_further}
    settled.update(r.claim_id for r in background_only)
    remaining = [r for r in challenged if r.claim_id not in settled]

    dist = {cat: Fraction(0) for cat in POST_CHALLENGE_CATEGORIES}
    dist["no-further-engagement"] = Fraction(len(no_further), n_ch)
    dist["background-only"] = Fraction(len(background_only), n_ch)
    pool = [e for r in remaining for e in r.post_challenge_edges
            if e.label != "background"]
    if pool:
        remaining_mass = Fraction(len(remaining), n_ch)
        for label in ("support", "extend", "qualify", "refute"):
            count = sum(1 for e in pool if e.label == label)
            dist[label] = remaining_mass * Fraction(count, len(pool))

    return ChallengeResult(
        records=tuple(records),
        challenged_share=n_ch / n_claims,
        qualify_only_share=(n_ch - refuted) / n_claims,
        refute_share=refuted / n_claims,
        median_time_to_challenge=median,
        post_challenge_distribution={cat: float(v)
                                     for cat, v in dist.items()},
    )


def age_rank(graph: ClaimGraph) -> dict[str, float]:
    """AgeRank(h) = |{h' : y(h') < y(h)}| / |H|, over all claims in the
    graph including h itself.  Same-year claims share a rank; the
    earliest claims score 0; no claim reaches 1."""
    if not graph.nodes:
        raise ClaimflowError("empty graph: age rank undefined")
    years = sorted(n.year for n in graph.nodes.values())
    total = len(years)
    # earlier_count[y] = number of claims with year strictly below y
    earlier: dict[int, int] = {}
    count = 0
    for i, y in enumerate(years):
        if y not in earlier:
            earlier[y] = i
    return {cid: earlier[graph.nodes[cid].year] / total
            for cid in sorted(graph.nodes)}


def norm_influence(graph: ClaimGraph, h: str, labels: str = "all") -> float:
    """Distinct citing papers into h over the number of corpus papers
    published strictly after y(h).  Raises when no later papers exist
    (final-year claims); :func:`influence_records` flags those instead."""
    if h not in graph.nodes:
        raise ClaimflowError(f"unknown claim '{h}'")
    year = graph.nodes[h].year
    later = sum(1 for p in graph.papers.values() if p.year > year)
    if later == 0:
        raise ClaimflowError(
            f"no papers published after {year}: influence undefined "
            f"for '{h}'")
    citing_papers = {graph.nodes[e.citing_claim_id].paper_id
                     for e in _in_edges(graph, h, labels)}
    return len(citing_papers) / later


@dataclass(frozen=True)
class InfluenceRecord:
    claim_id: str
    age_rank: float
    norm_influence: float | None  # None = undefined, excluded and flagged
    propagation_count: int


@dataclass(frozen=True)
class InfluenceResult:
    records: tuple[InfluenceRecord, ...]
    rho: float | None
    excluded: int
    labels: str


def influence_records(graph: ClaimGraph,
                      labels: str = "all") -> InfluenceResult:
    """Age rank and normalized influence per claim, plus the Spearman
    correlation between the two over claims where influence is defined."""
    ranks = age_rank(graph)
    propagation = propagation_counts(graph, labels=labels).per_claim
    records: list[InfluenceRecord] = []
    excluded = 0
    for cid in sorted(graph.nodes):
        try:
            influence = norm_influence(graph, cid, labels=labels)
        except ClaimflowError:
            influence = None
            excluded += 1
        records.append(InfluenceRecord(
            claim_id=cid, age_rank=ranks[cid], norm_influence=influence,
            propagation_count=propagation[cid]))
    defined = [r for r in records if r.norm_influence is not None]
    rho = None
    if len(defined) >= 2:
        try:
            rho = spearman([r.age_rank for r in defined],
                           [r.norm_influence for r in defined])
        except ClaimflowError:
            rho = None  # constant on one side
    return InfluenceResult(records=tuple(records), rho=rho,
                           excluded=excluded, labels=labels)


def edge_density(snapshot: ClaimGraph) -> float:
    """delta = |E_t| / (|V_t| (|V_t| - 1)) with distinct directed claim
    pairs in the numerator."""
    n = snapshot.node_count
    if n < 2:
        raise ClaimflowError("edge density needs at least 2 nodes")
    return snapshot.distinct_pairs() / (n * (n - 1))


@dataclass(frozen=True)
class ModularityResult:
    q: float
    communities: tuple[tuple[str, ...], ...]
    algorithm: str
    seed: int


def modularity(snapshot: ClaimGraph, seed: int = 42) -> ModularityResult:
    """Newman modularity of a greedy (Louvain-style) partition of the
    undirected weighted projection; parallel and antiparallel edges sum
    into one weight.  Deterministic for a fixed seed.  Falls back to the
    connected-components partition when greedy moves end below it, so
    the returned Q is never negative."""
    if not snapshot.edges:
        raise ClaimflowError("modularity needs at least one edge")
    weights: dict[tuple[str, str], int] = {}
    for e in snapshot.edges:
        key = (min(e.citing_claim_id, e.cited_claim_id),
               max(e.citing_claim_id, e.cited_claim_id))
        weights[key] = weights.get(key, 0) + 1
    projection = nx.Graph()
    projection.add_nodes_from(sorted(snapshot.nodes))
    for (a, b), w in sorted(weights.items()):
        projection.add_edge(a, b, weight=w)

    detected = nx.community.louvain_communities(projection, weight="weight",
                                                seed=seed)
    q_detected = nx.community.modularity(projection, detected,
                                         weight="weight")
    components = list(nx.connected_components(projection))
    q_components = nx.community.modularity(projection, components,
                                           weight="weight")
    if q_components > q_detected:
        partition, q = components, q_components
    else:
        partition, q = detected, q_detected
    communities = tuple(sorted(tuple(sorted(c)) for c in partition))
    return ModularityResult(q=float(q), communities=communities,
                            algorithm="louvain-greedy", seed=seed)


def venue_relation_distribution(
        graph: ClaimGraph,
        corpus: Corpus | None = None) -> dict[str, RelationDistribution]:
    """Label proportions grouped by the citing paper's venue.  Venues
    come from ``corpus`` when provided, else from the graph's paper
    table."""
    if corpus is not None:
        venue_of = {pid: p.venue for pid, p in corpus.papers.items()}
    else:
        venue_of = {pid: p.venue for pid, p in graph.papers.items()}
    grouped: dict[str, list[GraphEdge]] = {}
    for e in graph.edges:
        venue = venue_of[graph.nodes[e.citing_claim_id].paper_id]
        grouped.setdefault(venue, []).append(e)
    return {venue: _distribution(edges)
            for venue, edges in sorted(grouped.items())}


def convergence_divergence(graph: ClaimGraph, h: str) -> float:
    """D(h) = (k_out - k_in) / (k_out + k_in + 1) on distinct-neighbor
    degrees; isolated claims score exactly 0."""
    k_in, k_out = degrees(graph, h)
    return (k_out - k_in) / (k_out + k_in + 1)


def convergence_scores(graph: ClaimGraph) -> dict[str, tuple[int, int, float]]:
    """(k_in, k_out, D) for every claim, ascending claim_id."""
    out: dict[str, tuple[int, int, float]] = {}
    for cid in sorted(graph.nodes):
        k_in, k_out = degrees(graph, cid)
        out[cid] = (k_in, k_out, (k_out - k_in) / (k_out + k_in + 1))
    return out


def cumulative_uncertainty(graph: ClaimGraph,
                           h: str) -> list[tuple[int, float]]:
    """Running fraction of incoming edges labeled qualify or refute, by
    claim age.  One point per distinct age with at least one incoming
    edge at or before it."""
    if h not in graph.nodes:
        raise ClaimflowError(f"unknown claim '{h}'")
    incoming = graph.in_edges(h)
    if not incoming:
        raise ClaimflowError(f"claim '{h}' has no interactions")
    year = graph.nodes[h].year
    ages = sorted({e.citing_year - year for e in incoming})
    series: list[tuple[int, float]] = []
    for a in ages:
        upto = [e for e in incoming if e.citing_year - year <= a]
        flagged = sum(1 for e in upto if e.label in CHALLENGE_LABELS)
        series.append((a, flagged / len(upto)))
    return series


def corpus_uncertainty_curve(
        graph: ClaimGraph) -> list[tuple[int, float, int]]:
    """(age, mean fraction, claims averaged) at every integer age from
    the first observed interaction age to the last.  A claim enters the
    average once it has at least one interaction at or before that age;
    its value is its running qualify/refute fraction."""
    per_claim: dict[str, list[tuple[int, int, int]]] = {}
    for cid in sorted(graph.nodes):
        incoming = graph.in_edges(cid)
        if not incoming:
            continue
        year = graph.nodes[cid].year
        events = sorted((e.citing_year - year,
                         1 if e.label in CHALLENGE_LABELS else 0)
                        for e in incoming)
        cumulative = []
        flagged = total = 0
        for a, is_challenge in events:
            flagged += is_challenge
            total += 1
            cumulative.append((a, flagged, total))
        per_claim[cid] = cumulative
    if not per_claim:
        return []
    first_ages = [events[0][0] for events in per_claim.values()]
    last_ages = [events[-1][0] for events in per_claim.values()]
    curve: list[tuple[int, float, int]] = []
    for a in range(min(first_ages), max(last_ages) + 1):
        fractions: list[Fraction] = []
        for events in per_claim.values():
            latest = None
            for age, flagged, total in events:
                if age <= a:
                    latest = (flagged, total)
                else:
                    break
            if latest is not None:
                fractions.append(Fraction(*latest))
        if fractions:
            mean = sum(fractions, Fraction(0)) / len(fractions)
            curve.append((a, float(mean), len(fractions)))
    return curve
