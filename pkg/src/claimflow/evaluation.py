"""Paper-level splits and macro-averaged scoring of relation predictions.

Splits are assigned to whole papers so no claim or context leaks across
them; an edge belongs to the split of its citing paper.  Scores are
macro-averaged over all five labels with a fixed divisor of 5, and
undefined precision/recall components score 0.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus, LABELS, RelationEdge
from .errors import ClaimflowError, CorpusLoadError, KeyMismatchError

SPLITS = ("train", "validation", "test")

DEFAULT_RATIOS = (0.70, 0.15, 0.15)

# (citing_claim_id, cited_claim_id, context_index) identifies an instance
InstanceKey = tuple[str, str, int]


@dataclass(frozen=True)
class PredRecord:
    citing_claim_id: str
    cited_claim_id: str
    context_index: int
    label: str

    @property
    def key(self) -> InstanceKey:
        return (self.citing_claim_id, self.cited_claim_id,
                self.context_index)


@dataclass
class SplitAssignment:
    by_paper: dict[str, str]
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    seed: int = 42

    def papers_in(self, split: str) -> list[str]:
        if split not in SPLITS:
            raise ClaimflowError(f"unknown split {split!r}")
        return sorted(p for p, s in self.by_paper.items() if s == split)

    def sizes(self) -> dict[str, int]:
        out = {s: 0 for s in SPLITS}
        for s in self.by_paper.values():
            out[s] += 1
        return out


def _quotas(n_papers: int, ratios: Sequence[float]) -> list[int]:
    # largest-remainder seats; remainder ties go to the earlier split
    exact = [n_papers * r for r in ratios]
    floors = [int(q) for q in exact]
    leftover = n_papers - sum(floors)
    order = sorted(range(len(ratios)),
                   key=lambda i: (floors[i] - exact[i], i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def stratified_split(corpus: Corpus,
                     ratios: Sequence[float] = DEFAULT_RATIOS,
                     seed: int = 42) -> SplitAssignment:
    """Greedy label-stratified assignment of papers to train/validation/
    test.

    Papers are visited in descending gold-edge count (ties by id) and
    each goes to the split, among those still under their paper quota,
    with the largest remaining label-count deficit against its target
    share of the overall label distribution.  Deficit ties are settled
    by the seeded RNG; everything else is deterministic.
    """
    if len(ratios) != len(SPLITS):
        raise ClaimflowError(f"need {len(SPLITS)} ratios")
    if abs(sum(ratios) - 1.0) > 1e-9 or any(r <= 0 for r in ratios):
        raise ClaimflowError("ratios must be positive and sum to 1")
    gold = [e for e in corpus.edges if e.provenance == "gold"]
    if not gold:
        raise ClaimflowError("corpus has no gold edges to stratify on")

    quotas = _quotas(len(corpus.papers), ratios)
    if any(q == 0 for q in quotas):
        raise ClaimflowError(
            f"corpus too small: {len(corpus.papers)} papers cannot fill "
            f"all {len(SPLITS)} splits")

    label_counts_by_paper: dict[str, dict[str, int]] = {
        pid: {label: 0 for label in LABELS} for pid in corpus.papers}
    overall = {label: 0 for label in LABELS}
    for e in gold:
        pid = corpus.claims[e.citing_claim_id].paper_id
        label_counts_by_paper[pid][e.label] += 1
        overall[e.label] += 1

    ordered = sorted(
        corpus.papers,
        key=lambda pid: (-sum(label_counts_by_paper[pid].values()), pid))

    rng = random.Random(seed)
    targets = [{label: r * overall[label] for label in LABELS}
               for r in ratios]
    current = [{label: 0 for label in LABELS} for _ in SPLITS]
    assigned = [0] * len(SPLITS)
    by_paper: dict[str, str] = {}
    for pid in ordered:
        eligible = [i for i in range(len(SPLITS)) if assigned[i] < quotas[i]]
        deficits = []
        for i in eligible:
            deficit = sum(max(0.0, targets[i][label] - current[i][label])
                          for label in LABELS)
            deficits.append(deficit)
        best = max(deficits)
        tied = [i for i, d in zip(eligible, deficits) if d == best]
        choice = tied[0] if len(tied) == 1 else rng.choice(tied)
        by_paper[pid] = SPLITS[choice]
        assigned[choice] += 1
        for label in LABELS:
            current[choice][label] += label_counts_by_paper[pid][label]

    return SplitAssignment(by_paper=by_paper, ratios=tuple(ratios),
                           seed=seed)


def split_edges(corpus: Corpus, assignment: SplitAssignment,
                split: str) -> list[RelationEdge]:
    """Gold edges whose citing paper belongs to ``split``."""
    if split not in SPLITS:
        raise ClaimflowError(f"unknown split {split!r}")
    out = []
    for e in corpus.edges:
        if e.provenance != "gold":
            continue
        pid = corpus.claims[e.citing_claim_id].paper_id
        if assignment.by_paper.get(pid) == split:
            out.append(e)
    return out


@dataclass(frozen=True)
class LabelScores:
    precision: float
    recall: float
    f1: float


@dataclass
class EvalResult:
    per_label: dict[str, LabelScores]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: dict[str, dict[str, int]]  # gold label -> pred label -> n
    invalid_predictions: int
    instances: int

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "per_label": {
                label: {"precision": s.precision, "recall": s.recall,
                        "f1": s.f1}
                for label, s in self.per_label.items()
            },
            "macro": {"precision": self.macro_precision,
                      "recall": self.macro_recall, "f1": self.macro_f1},
            "confusion": self.confusion,
            "invalid_predictions": self.invalid_predictions,
        }


def _gold_items(gold: Sequence[RelationEdge]) -> dict[InstanceKey, str]:
    items: dict[InstanceKey, str] = {}
    for e in gold:
        key = (e.citing_claim_id, e.cited_claim_id, e.context_index)
        if key in items:
            raise ClaimflowError(f"duplicate gold instance key {key}")
        items[key] = e.label
    return items


def macro_prf(gold: Sequence[RelationEdge],
              pred: Sequence[PredRecord]) -> EvalResult:
    """Score predictions against gold instances sharing the same keys.

    Requires an exact key match (every gold instance predicted, nothing
    extra).  Predictions with labels outside the five-way scheme (the
    labeler's "invalid") count as misses for the gold label and never as
    hits.  Macro scores divide by 5 whether or not every label occurs.
    """
    gold_map = _gold_items(gold)
    pred_map: dict[InstanceKey, str] = {}
    for p in pred:
        if p.key in pred_map:
            raise ClaimflowError(f"duplicate prediction key {p.key}")
        pred_map[p.key] = p.label
    missing = sorted(k for k in gold_map if k not in pred_map)
    extra = sorted(k for k in pred_map if k not in gold_map)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"{len(missing)} gold keys unpredicted "
                         f"(first: {missing[0]})")
        if extra:
            parts.append(f"{len(extra)} extra prediction keys "
                         f"(first: {extra[0]})")
        raise KeyMismatchError("; ".join(parts), missing=missing,
                               extra=extra)

    confusion = {g: {p: 0 for p in LABELS} for g in LABELS}
    invalid = 0
    for key, gold_label in gold_map.items():
        pred_label = pred_map[key]
        if pred_label in LABELS:
            confusion[gold_label][pred_label] += 1
        else:
            invalid += 1

    per_label: dict[str, LabelScores] = {}
    for label in LABELS:
        tp = confusion[label][label]
        fp = sum(confusion[g][label] for g in LABELS if g != label)
        fn = sum(n for p, n in confusion[label].items() if p != label)
        fn += sum(1 for key, g in gold_map.items()
                  if g == label and pred_map[key] not in LABELS)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        per_label[label] = LabelScores(precision, recall, f1)

    k = len(LABELS)
    return EvalResult(
        per_label=per_label,
        macro_precision=sum(s.precision for s in per_label.values()) / k,
        macro_recall=sum(s.recall for s in per_label.values()) / k,
        macro_f1=sum(s.f1 for s in per_label.values()) / k,
        confusion=confusion,
        invalid_predictions=invalid,
        instances=len(gold_map),
    )


def majority_baseline(train: Sequence[RelationEdge],
                      eval_keys: Iterable[InstanceKey]) -> list[PredRecord]:
    """Predict the most frequent training label for every key; frequency
    ties break toward the earlier label in canonical order."""
    if not train:
        raise ClaimflowError("empty training set: no majority label")
    counts = {label: 0 for label in LABELS}
    for e in train:
        if e.label in counts:
            counts[e.label] += 1
    majority = max(LABELS, key=lambda label: counts[label])
    return [PredRecord(citing_claim_id=k[0], cited_claim_id=k[1],
                       context_index=k[2], label=majority)
            for k in eval_keys]


def edge_keys(edges: Sequence[RelationEdge]) -> list[InstanceKey]:
    return [(e.citing_claim_id, e.cited_claim_id, e.context_index)
            for e in edges]


def save_split(assignment: SplitAssignment, path: str | Path) -> None:
    doc = {
        "ratios": list(assignment.ratios),
        "seed": assignment.seed,
        "assignment": dict(sorted(assignment.by_paper.items())),
    }
    Path(path).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_split(path: str | Path) -> SplitAssignment:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return SplitAssignment(by_paper=dict(doc["assignment"]),
                           ratios=tuple(doc["ratios"]), seed=doc["seed"])


def save_labeled_edges(edges: Sequence[RelationEdge],
                       path: str | Path) -> None:
    """Instance file: corpus-style edge records, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for e in edges:
            fh.write(json.dumps(
                {"kind": "edge", "citing_claim": e.citing_claim_id,
                 "cited_claim": e.cited_claim_id, "label": e.label,
                 "context_index": e.context_index,
                 "provenance": e.provenance},
                sort_keys=True, separators=(",", ":")) + "\n")


def load_labeled_edges(source: str | Path | Iterable[str]
                       ) -> list[RelationEdge]:
    """Read an instance file back.  Years are not stored in edge records
    and load as 0; evaluation never consults them."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    out: list[RelationEdge] = []
    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON ({exc.msg})", num) from exc
        if record.get("kind") != "edge":
            raise CorpusLoadError(
                f"unexpected record kind {record.get('kind')!r}", num)
        out.append(RelationEdge(
            citing_claim_id=record["citing_claim"],
            cited_claim_id=record["cited_claim"],
            label=record["label"],
            context_index=record["context_index"],
            provenance=record.get("provenance", "gold"),
            year=0,
        ))
    return out


def save_predictions(preds: Sequence[PredRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(json.dumps(
                {"kind": "pred", "citing_claim": p.citing_claim_id,
                 "cited_claim": p.cited_claim_id,
                 "context_index": p.context_index, "label": p.label},
                sort_keys=True, separators=(",", ":")) + "\n")


def load_predictions(source: str | Path | Iterable[str]) -> list[PredRecord]:
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    out: list[PredRecord] = []
    for num, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusLoadError(f"invalid JSON ({exc.msg})", num) from exc
        if record.get("kind") != "pred":
            raise CorpusLoadError(
                f"unexpected record kind {record.get('kind')!r}", num)
        out.append(PredRecord(
            citing_claim_id=record["citing_claim"],
            cited_claim_id=record["cited_claim"],
            context_index=record["context_index"],
            label=record["label"],
        ))
    return out
