"""MetricReport assembly and CSV/JSON export.

One report per metric: a fixed column schema, rows in deterministic
order, the parameters that produced them, and a fingerprint of the
analyzed graph.  Re-running with identical inputs and parameters yields
byte-identical exports.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .analytics import (
    challenge_analysis,
    convergence_scores,
    corpus_uncertainty_curve,
    edge_density,
    influence_records,
    modularity,
    propagation_counts,
    relation_distribution,
    time_to_first_reuse,
    venue_relation_distribution,
)
from .claim_graph import ClaimGraph, graph_fingerprint, snapshot_at
from .corpus import Corpus, LABELS
from .errors import ClaimflowError
from .stats import kaplan_meier

METRIC_NAMES = (
    "relation-dist", "propagation", "reuse-survival", "challenge",
    "influence", "density", "modularity", "venue", "convdiv",
    "uncertainty",
)


@dataclass
class MetricReport:
    metric: str
    parameters: dict
    fingerprint: str
    columns: list[str]
    rows: list[dict]
    summary: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_format_cell(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json_text(self) -> str:
        doc = {
            "metric": self.metric,
            "parameters": self.parameters,
            "fingerprint": self.fingerprint,
            "summary": self.summary,
            "rows": self.rows,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_report(metric: str, graph: ClaimGraph,
                 corpus: Corpus | None = None, *, labels: str = "all",
                 horizon: int | None = None, seed: int = 42) -> MetricReport:
    """Dispatch to the per-metric builder; ``metric`` must be one of
    :data:`METRIC_NAMES`."""
    try:
        builder = _BUILDERS[metric]
    except KeyError:
        raise ClaimflowError(
            f"unknown metric {metric!r}; expected one of "
            f"{', '.join(METRIC_NAMES)}") from None
    return builder(graph, corpus, labels=labels, horizon=horizon, seed=seed)


def _report(metric: str, graph: ClaimGraph, parameters: dict,
            columns: list[str], rows: list[dict],
            summary: dict) -> MetricReport:
    return MetricReport(
        metric=metric, parameters=parameters,
        fingerprint=graph_fingerprint(graph),
        columns=columns, rows=rows, summary=summary,
    )


def _relation_dist(graph, corpus, *, labels, horizon, seed):
    dist = relation_distribution(graph)
    rows = [{"label": label, "count": dist.counts[label],
             "proportion": dist.proportions[label]} for label in LABELS]
    return _report("relation-dist", graph, {}, ["label", "count",
                                                "proportion"],
                   rows, {"total": dist.total})


def _propagation(graph, corpus, *, labels, horizon, seed):
    result = propagation_counts(graph, labels=labels)
    rows = [{"claim": cid, "citing_papers": count}
            for cid, count in result.per_claim.items()]
    summary = {"isolated_fraction": result.isolated_fraction,
               "mean": result.mean,
               "tail_share_ge_10": result.tail_share_ge_10}
    return _report("propagation", graph, {"labels": labels},
                   ["claim", "citing_papers"], rows, summary)


def _reuse_survival(graph, corpus, *, labels, horizon, seed):
    data = time_to_first_reuse(graph, horizon_year=horizon, labels=labels)
    curve = kaplan_meier(data)
    effective_horizon = horizon
    if effective_horizon is None and graph.papers:
        effective_horizon = max(p.year for p in graph.papers.values())
    summary = {"observations": len(data.durations),
               "events": sum(1 for e in data.events if e),
               "horizon": effective_horizon}
    return _report("reuse-survival", graph,
                   {"labels": labels, "horizon": effective_horizon},
                   ["time", "survival", "at_risk", "events"],
                   curve.rows(), summary)


def _challenge(graph, corpus, *, labels, horizon, seed):
    result = challenge_analysis(graph)
    rows = [{"claim": r.claim_id, "challenged": int(r.challenged),
             "first_challenge_year": r.first_challenge_year,
             "time_to_challenge": r.time_to_challenge,
             "post_challenge_edges": len(r.post_challenge_edges)}
            for r in result.records]
    summary = {
        "challenged_share": result.challenged_share,
        "qualify_only_share": result.qualify_only_share,
        "refute_share": result.refute_share,
        "median_time_to_challenge": result.median_time_to_challenge,
        "post_challenge_distribution": result.post_challenge_distribution,
    }
    return _report("challenge", graph, {},
                   ["claim", "challenged", "first_challenge_year",
                    "time_to_challenge", "post_challenge_edges"],
                   rows, summary)


def _influence(graph, corpus, *, labels, horizon, seed):
    result = influence_records(graph, labels=labels)
    rows = [{"claim": r.claim_id, "age_rank": r.age_rank,
             "norm_influence": r.norm_influence,
             "citing_papers": r.propagation_count}
            for r in result.records]
    summary = {"spearman_rho": result.rho, "excluded": result.excluded}
    return _report("influence", graph, {"labels": labels},
                   ["claim", "age_rank", "norm_influence", "citing_papers"],
                   rows, summary)


def _density(graph, corpus, *, labels, horizon, seed):
    rows = []
    if graph.nodes:
        first, last = graph.year_range()
        for t in range(first, last + 1):
            snap = snapshot_at(graph, t)
            if snap.node_count < 2:
                continue  # density undefined below 2 nodes
            rows.append({"year": t, "nodes": snap.node_count,
                         "distinct_pairs": snap.distinct_pairs(),
                         "density": edge_density(snap)})
    return _report("density", graph, {}, ["year", "nodes", "distinct_pairs",
                                          "density"],
                   rows, {"years": len(rows)})


def _modularity(graph, corpus, *, labels, horizon, seed):
    rows = []
    if graph.nodes:
        first, last = graph.year_range()
        for t in range(first, last + 1):
            snap = snapshot_at(graph, t)
            if not snap.edges:
                continue  # modularity undefined without edges
            result = modularity(snap, seed=seed)
            rows.append({"year": t, "nodes": snap.node_count,
                         "edges": snap.edge_count, "q": result.q,
                         "communities": len(result.communities)})
    return _report("modularity", graph,
                   {"seed": seed, "algorithm": "louvain-greedy"},
                   ["year", "nodes", "edges", "q", "communities"],
                   rows, {"years": len(rows)})


def _venue(graph, corpus, *, labels, horizon, seed):
    grouped = venue_relation_distribution(graph, corpus)
    rows = []
    for venue, dist in grouped.items():
        for label in LABELS:
            rows.append({"venue": venue, "label": label,
                         "count": dist.counts[label],
                         "proportion": dist.proportions[label]})
    return _report("venue", graph, {}, ["venue", "label", "count",
                                        "proportion"],
                   rows, {"venues": len(grouped)})


def _convdiv(graph, corpus, *, labels, horizon, seed):
    scores = convergence_scores(graph)
    rows = [{"claim": cid, "k_in": k_in, "k_out": k_out, "score": score}
            for cid, (k_in, k_out, score) in scores.items()]
    if scores:
        mean = sum((Fraction(k_out - k_in, k_out + k_in + 1)
                    for _, (k_in, k_out, _) in scores.items()),
                   Fraction(0)) / len(scores)
        mean_score = float(mean)
    else:
        mean_score = 0.0
    return _report("convdiv", graph, {}, ["claim", "k_in", "k_out", "score"],
                   rows, {"mean_score": mean_score})


def _uncertainty(graph, corpus, *, labels, horizon, seed):
    curve = corpus_uncertainty_curve(graph)
    rows = [{"age": age, "mean_fraction": value, "claims": n}
            for age, value, n in curve]
    return _report("uncertainty", graph, {},
                   ["age", "mean_fraction", "claims"],
                   rows, {"ages": len(rows)})


_BUILDERS = {
    "relation-dist": _relation_dist,
    "propagation": _propagation,
    "reuse-survival": _reuse_survival,
    "challenge": _challenge,
    "influence": _influence,
    "density": _density,
    "modularity": _modularity,
    "venue": _venue,
    "convdiv": _convdiv,
    "uncertainty": _uncertainty,
}
