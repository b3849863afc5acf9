"""Paper-level stratified splitting and macro-averaged scoring."""

from pathlib import Path

from claimflow import (
    LABELS,
    edge_keys,
    load_corpus,
    macro_prf,
    majority_baseline,
    split_edges,
    stratified_split,
)

DATA = Path(__file__).resolve().parents[1] / "data" / "gold_corpus.jsonl"

corpus = load_corpus(DATA)
assignment = stratified_split(corpus, seed=42)
print("split sizes (papers):", assignment.sizes())

# stratification holds each split's label shares close to the overall mix
overall = {label: 0 for label in LABELS}
for e in corpus.edges:
    overall[e.label] += 1
total = len(corpus.edges)

print()
header = "".join(f"{label:>12}" for label in LABELS)
print(f"{'split':<12}{header}")
print(f"{'overall':<12}" + "".join(
    f"{100 * overall[label] / total:>11.1f}%" for label in LABELS))
for split in ("train", "validation", "test"):
    edges = split_edges(corpus, assignment, split)
    row = "".join(
        f"{100 * sum(1 for e in edges if e.label == label) / len(edges):>11.1f}%"
        for label in LABELS)
    print(f"{split:<12}{row}")

# score the majority baseline on the held-out test edges
train = split_edges(corpus, assignment, "train")
test = split_edges(corpus, assignment, "test")
preds = majority_baseline(train, edge_keys(test))
result = macro_prf(test, preds)

print()
print(f"majority baseline predicts {preds[0].label!r} on "
      f"{len(test)} test edges")
print(f"macro P/R/F1 = {result.macro_precision:.3f} "
      f"{result.macro_recall:.3f} {result.macro_f1:.3f}")
print("per label:")
for label, scores in result.per_label.items():
    print(f"  {label:<12} P={scores.precision:.2f} R={scores.recall:.2f} "
          f"F1={scores.f1:.2f}")

# a perfect predictor scores 1.0 by construction
from claimflow import PredRecord

perfect = [PredRecord(e.citing_claim_id, e.cited_claim_id,
                      e.context_index, e.label) for e in test]
print()
print("gold-as-predictions macro F1 =",
      macro_prf(test, perfect).macro_f1)
