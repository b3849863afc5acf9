"""Merge near-duplicate claims with a small hand-built example.

Embeddings here are toy 2-d unit vectors so the cosine geometry is easy
to see; real corpora would bring their own encoder output.
"""

import math

from claimflow import (
    Claim,
    CitationContext,
    Corpus,
    EmbeddingTable,
    Paper,
    RelationEdge,
    canonicalize_corpus,
    cosine_similarity,
)


def vec(deg):
    rad = math.radians(deg)
    return (math.cos(rad), math.sin(rad))


papers = {
    "p1": Paper("p1", "threshold effects in X", "ACL", 2019),
    "p2": Paper("p2", "a follow-up on X", "EMNLP", 2021),
}
claims = {
    "p1-c1": Claim("p1-c1", "p1", ("X rises with Y",), "X rises with Y",
                   ("results",)),
    "p1-c2": Claim("p1-c2", "p1",
                   ("we find that X rises with Y in all settings",),
                   "we find that X rises with Y in all settings",
                   ("discussion",)),
    "p1-c3": Claim("p1-c3", "p1", ("Z is unaffected",), "Z is unaffected",
                   ("results",)),
    "p2-c1": Claim("p2-c1", "p2", ("X only rises for large Y",),
                   "X only rises for large Y", ("results",)),
}
contexts = [CitationContext("p2", "p1", "Prior work studied X.",
                            "Threshold effects were reported (p1).",
                            "We revisit this.")]
edges = [RelationEdge("p2-c1", "p1-c1", "qualify", 0, "gold", 2021),
         RelationEdge("p2-c1", "p1-c2", "qualify", 0, "gold", 2021)]
corpus = Corpus(papers=papers, claims=claims, contexts=contexts,
                edges=edges)

# p1-c1 and p1-c2 sit 10 degrees apart (cosine 0.985), p1-c3 is orthogonal
table = EmbeddingTable.from_dict({
    "p1-c1": vec(0), "p1-c2": vec(10), "p1-c3": vec(90), "p2-c1": vec(45),
})
print("cos(p1-c1, p1-c2) =", round(cosine_similarity(
    table.get("p1-c1"), table.get("p1-c2")), 4))

result = canonicalize_corpus(corpus, table, tau=0.90)

print()
print("clusters:")
for members in result.mapping.clusters:
    rep = result.mapping.resolve(members[0])
    mark = " <- merged" if len(members) > 1 else ""
    print(f"  {rep}: {list(members)}{mark}")

s = result.summary
print()
print(f"claims {s['claims_before']} -> {s['claims_after']} "
      f"({s['reduction_pct']:.1f}% merged away)")
print(f"edges  {s['edges_before']} -> {s['edges_after']} "
      "(parallel qualify edges collapse to one)")

# the representative keeps every surface text of its cluster
rep = result.corpus.claims[result.mapping.resolve("p1-c2")]
print()
print(f"representative {rep.claim_id} carries {len(rep.surface_texts)} "
      "texts:")
for t in rep.surface_texts:
    print(f"  - {t}")
