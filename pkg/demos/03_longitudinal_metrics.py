"""Longitudinal analytics over the bundled corpus.

Walks the question list end to end: label mix, propagation, reuse
survival, challenges, influence vs age, densification, community
structure, convergence roles, uncertainty trajectories.
"""

from pathlib import Path

from claimflow import (
    build_graph,
    challenge_analysis,
    corpus_uncertainty_curve,
    edge_density,
    influence_records,
    kaplan_meier,
    load_corpus,
    modularity,
    propagation_counts,
    relation_distribution,
    snapshot_at,
    time_to_first_reuse,
    venue_relation_distribution,
)

DATA = Path(__file__).resolve().parents[1] / "data" / "gold_corpus.jsonl"

graph = build_graph(load_corpus(DATA))
lo, hi = graph.year_range()
print(f"graph: {graph.node_count} claims, {graph.edge_count} edges, "
      f"{lo}-{hi}")

print()
print("label mix")
dist = relation_distribution(graph)
for label, share in dist.proportions.items():
    print(f"  {label:<12} {100 * share:5.1f}%")

print()
print("propagation")
prop = propagation_counts(graph)
print(f"  isolated claims: {100 * prop.isolated_fraction:.1f}%")
print(f"  mean citing papers per claim: {prop.mean:.2f}")
print(f"  claims with >= 10 citing papers: "
      f"{100 * prop.tail_share_ge_10:.2f}%")

print()
print("time to first reuse (Kaplan-Meier)")
curve = kaplan_meier(time_to_first_reuse(graph))
for t, s in list(zip(curve.times, curve.survival))[:8]:
    print(f"  S({t:>2}) = {s:.3f}")
print(f"  ({len(curve.times)} event times total)")

print()
print("challenges")
ch = challenge_analysis(graph)
print(f"  challenged claims: {100 * ch.challenged_share:.1f}%")
print(f"  median years to first challenge: "
      f"{ch.median_time_to_challenge}")
top = sorted(ch.post_challenge_distribution.items(),
             key=lambda kv: kv[1], reverse=True)[:3]
for kind, share in top:
    print(f"  after a challenge, {kind}: {100 * share:.1f}%")

print()
print("influence vs. age")
inf = influence_records(graph)
rho = inf.rho
print(f"  spearman(age rank, normalized influence) = {rho:.3f}")
print(f"  final-year claims excluded: {inf.excluded}")

print()
print("densification (snapshot density, sampled years)")
for year in range(lo + 9, hi + 1, 12):
    snap = snapshot_at(graph, year)
    if snap.node_count >= 2:
        print(f"  {year}: n={snap.node_count:>4}  "
              f"density={edge_density(snap):.2e}")

print()
print("community structure")
mod = modularity(graph, seed=42)
sizes = sorted((len(c) for c in mod.communities), reverse=True)
print(f"  Q = {mod.q:.3f} over {len(mod.communities)} communities "
      f"(largest {sizes[0]})")

print()
print("venue differences in label mix")
for venue, vdist in venue_relation_distribution(graph).items():
    support = 100 * vdist.proportions["support"]
    refute = 100 * vdist.proportions["refute"]
    print(f"  {venue:<8} n={vdist.total:>4}  support {support:4.1f}%  "
          f"refute {refute:3.1f}%")

print()
print("corpus uncertainty curve (first years after a claim appears)")
for age, frac, n in corpus_uncertainty_curve(graph)[:6]:
    print(f"  age {age:>2}: qualify+refute share {100 * frac:5.1f}% "
          f"over {n} claims")
