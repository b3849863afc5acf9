"""Load the bundled corpus, validate it, and poke at the records."""

from pathlib import Path

from claimflow import load_corpus, restrict_citations, validate_corpus

DATA = Path(__file__).resolve().parents[1] / "data" / "gold_corpus.jsonl"

corpus = load_corpus(DATA)
print(f"papers:   {len(corpus.papers)}")
print(f"claims:   {len(corpus.claims)}")
print(f"contexts: {len(corpus.contexts)}")
print(f"edges:    {len(corpus.edges)}")

report = validate_corpus(corpus)
print(f"violations: {len(report.violations)}")

# restriction to in-corpus citations is a no-op on this bundle
restricted = restrict_citations(corpus)
print(f"dropped by restriction: {restricted.dropped_contexts} contexts, "
      f"{restricted.dropped_edges} edges")

# a paper and its claims
pid = sorted(corpus.papers)[0]
paper = corpus.papers[pid]
print()
print(f"{paper.paper_id} ({paper.year}, {paper.venue}): {paper.title}")
for claim in corpus.claims_of_paper(pid):
    print(f"  {claim.claim_id}: {claim.canonical_text[:70]}")

# one citation context with its sentence windows
ctx = corpus.contexts[0]
print()
print(f"context 0: {ctx.citing_paper_id} cites {ctx.cited_paper_id}")
print(f"  pre:  {ctx.pre_sentence[:60]}")
print(f"  sent: {ctx.citation_sentence[:60]}")
print(f"  post: {ctx.post_sentence[:60]}")

# label inventory over the gold edges
counts = {}
for e in corpus.edges:
    counts[e.label] = counts.get(e.label, 0) + 1
print()
for label in sorted(counts, key=counts.get, reverse=True):
    print(f"{label:<12} {counts[label]:>4}  "
          f"{100 * counts[label] / len(corpus.edges):5.1f}%")
