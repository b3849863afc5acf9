import math
import random
from pathlib import Path

import pytest

from claimflow import (
    Claim,
    CitationContext,
    Corpus,
    EmbeddingTable,
    Paper,
    RelationEdge,
    build_graph,
    load_corpus,
    validate_corpus,
)

DATA = Path(__file__).resolve().parent.parent / "data"

# planted duplicate groups for the 100-claim canonicalization fixture;
# sizes sum to 19, so 19 - 8 = 11 claims merge away leaving 89
DUP_GROUP_SIZES = (4, 3, 2, 2, 2, 2, 2, 2)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\n[ACCEPTANCE] {name}: {report.outcome.upper()}")


@pytest.fixture(scope="session")
def gold_path() -> Path:
    return DATA / "gold_corpus.jsonl"


@pytest.fixture(scope="session")
def gold_corpus(gold_path) -> Corpus:
    return load_corpus(gold_path)


@pytest.fixture(scope="session")
def gold_graph(gold_corpus):
    return build_graph(gold_corpus)


def _make_synthetic_corpus() -> Corpus:
    """20 papers over 2000-2014, 50 claims, 120 labeled edges.

    Shaped to exercise every analytics edge case: same-year citations,
    parallel edges with distinct labels, claims in the final year (zero
    exposure window), isolated claims, and all five labels.
    """
    rng = random.Random(2024)
    papers = {}
    for i in range(20):
        pid = f"q{i + 1:02d}"
        year = 2000 + (i * 15) // 20
        venue = ("ACL", "EMNLP", "other")[i % 3]
        papers[pid] = Paper(pid, f"study {i + 1}", venue, year)
    # final-year paper so norm_influence has an undefined record
    papers["q20"] = Paper("q20", "study 20", "ACL", 2014)

    paper_ids = sorted(papers)
    claims = {}
    serial = 0
    for pid in paper_ids:
        n_claims = 3 if int(pid[1:]) % 2 == 0 else 2  # 10x3 + 10x2 = 50
        for k in range(1, n_claims + 1):
            serial += 1
            cid = f"{pid}-c{k}"
            claims[cid] = Claim(
                claim_id=cid, paper_id=pid,
                surface_texts=(f"finding {serial} holds",),
                canonical_text=f"finding {serial} holds",
                section_tags=("other",),
            )
    assert len(claims) == 50

    by_paper = {pid: sorted(c.claim_id for c in claims.values()
                            if c.paper_id == pid) for pid in paper_ids}

    contexts = []
    pair_of_context = []
    seen_pairs = set()
    while len(contexts) < 70:
        citing = rng.choice(paper_ids)
        candidates = [p for p in paper_ids
                      if p != citing
                      and papers[p].year <= papers[citing].year]
        if not candidates:
            continue
        cited = rng.choice(candidates)
        if (citing, cited) in seen_pairs and rng.random() < 0.5:
            continue  # keep some duplicate pairs, not too many
        seen_pairs.add((citing, cited))
        contexts.append(CitationContext(
            citing_paper_id=citing, cited_paper_id=cited,
            preceding="Earlier systems struggled here.",
            marker=f"As shown previously ({cited}).",
            following="We revisit that result.",
        ))
        pair_of_context.append((citing, cited))

    labels_cycle = ["background"] * 5 + ["support"] * 3 + ["extend"] * 2 \
        + ["qualify", "refute"]
    edges = []
    attempts = 0
    while len(edges) < 120 and attempts < 10000:
        attempts += 1
        idx = rng.randrange(len(contexts))
        citing_pid, cited_pid = pair_of_context[idx]
        e = RelationEdge(
            citing_claim_id=rng.choice(by_paper[citing_pid]),
            cited_claim_id=rng.choice(by_paper[cited_pid]),
            label=labels_cycle[len(edges) % len(labels_cycle)],
            context_index=idx,
            provenance="gold",
            year=papers[citing_pid].year,
        )
        key = (e.citing_claim_id, e.cited_claim_id, e.label, e.context_index)
        if any((x.citing_claim_id, x.cited_claim_id, x.label,
                x.context_index) == key for x in edges):
            continue
        edges.append(e)
    assert len(edges) == 120

    corpus = Corpus(papers=papers, claims=claims, contexts=contexts,
                    edges=edges)
    assert validate_corpus(corpus).empty
    return corpus


@pytest.fixture(scope="session")
def synthetic_corpus() -> Corpus:
    return _make_synthetic_corpus()


@pytest.fixture(scope="session")
def synthetic_graph(synthetic_corpus):
    graph = build_graph(synthetic_corpus)
    assert graph.node_count == 50
    assert graph.edge_count == 120
    return graph


def _unit(vec):
    norm = math.sqrt(sum(v * v for v in vec))
    return tuple(v / norm for v in vec)


def _make_dup_fixture():
    """100 claims over 10 papers with planted duplicate groups.

    Returns (corpus, table, groups) where groups is the expected cluster
    partition per paper.  Group members sit within 2 degrees of their
    seed direction (cosine > 0.999); everything else is orthogonal.
    """
    dim = 128
    papers = {f"d{i + 1:02d}": Paper(f"d{i + 1:02d}", f"paper {i + 1}",
                                     "ACL", 2000 + i) for i in range(10)}
    paper_ids = sorted(papers)

    claims = {}
    vectors = {}
    groups = []
    axis = 0
    serial = 0

    def add_claim(pid, direction, text):
        nonlocal serial
        serial += 1
        existing = sum(1 for c in claims.values() if c.paper_id == pid)
        cid = f"{pid}-c{existing + 1:02d}"
        claims[cid] = Claim(claim_id=cid, paper_id=pid,
                            surface_texts=(text,), canonical_text=text,
                            section_tags=("other",))
        vectors[cid] = direction
        return cid

    # one planted group per paper for the first eight papers
    for pid, size in zip(paper_ids, DUP_GROUP_SIZES):
        base = [0.0] * dim
        base[axis] = 1.0
        members = []
        for j in range(size):
            jitter = [0.0] * dim
            jitter[axis] = 1.0
            jitter[axis + 1] = 0.03 * j  # cosine to seed >= 0.9995
            text = f"shared result in {pid} restated {'x' * j}"
            members.append(add_claim(pid, _unit(jitter), text))
        del base
        groups.append(tuple(members))
        axis += 2

    # pad every paper with mutually orthogonal singleton claims to 100
    total_planted = sum(DUP_GROUP_SIZES)
    fillers_needed = 100 - total_planted
    i = 0
    while i < fillers_needed:
        pid = paper_ids[i % len(paper_ids)]
        direction = [0.0] * dim
        direction[axis] = 1.0
        axis += 1
        add_claim(pid, tuple(direction), f"distinct finding {i + 1}")
        i += 1
    assert len(claims) == 100
    assert axis <= dim

    singleton_groups = [
        (cid,) for cid in sorted(claims)
        if not any(cid in g for g in groups)
    ]

    # edges into and out of group members so redirection has work to do:
    # papers cite the previous paper's first planted/filler claim
    contexts = []
    edges = []
    for i in range(1, len(paper_ids)):
        citing, cited = paper_ids[i], paper_ids[i - 1]
        contexts.append(CitationContext(
            citing_paper_id=citing, cited_paper_id=cited,
            preceding="", marker=f"Following ({cited}).", following=""))
        citing_claims = sorted(c.claim_id for c in claims.values()
                               if c.paper_id == citing)
        cited_claims = sorted(c.claim_id for c in claims.values()
                              if c.paper_id == cited)
        for k, label in ((0, "support"), (1, "extend"), (2, "background")):
            edges.append(RelationEdge(
                citing_claim_id=citing_claims[k % len(citing_claims)],
                cited_claim_id=cited_claims[k % len(cited_claims)],
                label=label, context_index=len(contexts) - 1,
                provenance="gold", year=papers[citing].year))

    corpus = Corpus(papers=papers, claims=claims, contexts=contexts,
                    edges=edges)
    assert validate_corpus(corpus).empty
    table = EmbeddingTable.from_dict(
        {cid: vec for cid, vec in vectors.items()})
    expected = sorted(tuple(sorted(g)) for g in groups + singleton_groups)
    return corpus, table, expected


@pytest.fixture(scope="session")
def dup_fixture():
    return _make_dup_fixture()
