import math

import numpy as np
import pytest

from claimflow import (
    Claim,
    CitationContext,
    ClaimflowError,
    ClusterMapping,
    Corpus,
    EmbeddingTable,
    MissingEmbeddingError,
    Paper,
    RelationEdge,
    canonicalize_corpus,
    cluster_claims,
    cosine_similarity,
    load_embeddings,
    load_mapping,
    redirect_edges,
    save_embeddings,
    save_mapping,
    select_representative,
)


def test_cosine_identity():
    v = np.array([1.0, 0.0])
    assert cosine_similarity(v, v) == 1.0


def test_cosine_orthogonal():
    assert cosine_similarity(np.array([1.0, 0.0]),
                             np.array([0.0, 1.0])) == 0.0


def test_cosine_hand_value():
    u = np.array([1.0, 2.0, 2.0])
    v = np.array([2.0, 1.0, 2.0])
    assert cosine_similarity(u, v) == 8 / 9


def test_cosine_dimension_mismatch():
    with pytest.raises(ClaimflowError):
        cosine_similarity(np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0]))


def test_cosine_zero_norm():
    with pytest.raises(ClaimflowError):
        cosine_similarity(np.array([0.0, 0.0]), np.array([1.0, 0.0]))


def _vec(angle_deg: float) -> tuple[float, float]:
    rad = math.radians(angle_deg)
    return (math.cos(rad), math.sin(rad))


def test_pair_above_threshold_merges():
    table = EmbeddingTable.from_dict({"a-c1": _vec(0), "a-c2": _vec(10)})
    # cos(10 deg) ~ 0.985
    mapping = cluster_claims(["a-c1", "a-c2"], table, tau=0.90)
    assert mapping.clusters == (("a-c1", "a-c2"),)


def test_pair_below_threshold_stays_apart():
    table = EmbeddingTable.from_dict({"a-c1": _vec(0), "a-c2": _vec(60)})
    # cos(60 deg) = 0.5
    mapping = cluster_claims(["a-c1", "a-c2"], table, tau=0.90)
    assert mapping.clusters == (("a-c1",), ("a-c2",))


def test_greedy_attaches_to_seed_not_members():
    """b and c both clear tau against seed a, but not against each other;
    seed-attachment still produces one cluster {a, b, c}."""
    table = EmbeddingTable.from_dict({
        "p-a": _vec(0),      # seed
        "p-b": _vec(18),     # cos 18 ~ 0.951 vs a; cos 36 ~ 0.809 vs c
        "p-c": _vec(-18),
    })
    assert cosine_similarity(np.asarray(_vec(18)),
                             np.asarray(_vec(-18))) < 0.90
    mapping = cluster_claims(["p-a", "p-b", "p-c"], table, tau=0.90)
    assert mapping.clusters == (("p-a", "p-b", "p-c"),)


def test_later_claim_joins_first_matching_seed():
    # two seeds both above tau for the third claim; ascending order means
    # the earlier seed wins
    table = EmbeddingTable.from_dict({
        "p-c1": _vec(0),
        "p-c2": _vec(30),   # cos 30 ~ 0.866 < tau: its own seed
        "p-c3": _vec(15),   # 0.966 vs c1, 0.966 vs c2 -> joins c1
    })
    mapping = cluster_claims(["p-c1", "p-c2", "p-c3"], table, tau=0.90)
    assert mapping.clusters == (("p-c1", "p-c3"), ("p-c2",))


def test_cluster_tau_bounds():
    table = EmbeddingTable.from_dict({"a-c1": _vec(0)})
    with pytest.raises(ClaimflowError):
        cluster_claims(["a-c1"], table, tau=0.0)
    with pytest.raises(ClaimflowError):
        cluster_claims(["a-c1"], table, tau=1.2)


def test_missing_embedding_raises():
    table = EmbeddingTable.from_dict({"a-c1": _vec(0)})
    with pytest.raises(MissingEmbeddingError):
        cluster_claims(["a-c1", "a-c2"], table, tau=0.9)


def _corpus_two_papers() -> Corpus:
    papers = {"a": Paper("a", "first", "ACL", 2000),
              "b": Paper("b", "second", "ACL", 2001)}
    claims = {
        "a-c1": Claim("a-c1", "a", ("short",), "short", ("other",)),
        "a-c2": Claim("a-c2", "a", ("a longer claim text",),
                      "a longer claim text", ("other",)),
        "b-c1": Claim("b-c1", "b", ("downstream",), "downstream",
                      ("other",)),
    }
    contexts = [CitationContext("b", "a", "", "See (a).", "")]
    edges = [RelationEdge("b-c1", "a-c1", "support", 0, "gold", 2001)]
    return Corpus(papers=papers, claims=claims, contexts=contexts,
                  edges=edges)


def test_select_representative_prefers_longest():
    corpus = _corpus_two_papers()
    assert select_representative(["a-c1", "a-c2"], corpus) == "a-c2"
    assert select_representative(["a-c1"], corpus) == "a-c1"


def test_select_representative_tie_breaks_by_byte_order():
    papers = {"p": Paper("p", "t", "ACL", 2000)}
    claims = {
        "p-c2": Claim("p-c2", "p", ("same size",), "same size", ("other",)),
        "p-c10": Claim("p-c10", "p", ("also size",), "also size",
                       ("other",)),
    }
    corpus = Corpus(papers=papers, claims=claims, contexts=[], edges=[])
    # "p-c10" < "p-c2" in byte order
    assert select_representative(["p-c2", "p-c10"], corpus) == "p-c10"


def test_redirect_substitutes_endpoints():
    corpus = _corpus_two_papers()
    mapping = ClusterMapping(
        representative={"a-c1": "a-c2", "a-c2": "a-c2"},
        clusters=(("a-c1", "a-c2"),))
    out = redirect_edges(corpus, mapping)
    assert "a-c1" not in out.claims
    assert out.edges[0].cited_claim_id == "a-c2"
    # surviving representative absorbs the merged claim's surface texts
    assert "short" in out.claims["a-c2"].surface_texts


def test_redirect_identity_mapping_is_fixpoint():
    corpus = _corpus_two_papers()
    identity = ClusterMapping(
        representative={cid: cid for cid in corpus.claims},
        clusters=tuple((cid,) for cid in sorted(corpus.claims)))
    out = redirect_edges(corpus, identity)
    assert out.claims == corpus.claims
    assert out.edges == corpus.edges


def test_redirect_drops_collapsed_self_edges():
    # hand-built corpus with a same-paper edge (invalid as data, but the
    # redirect contract still has to drop the collapsed form)
    papers = {"p": Paper("p", "t", "ACL", 2000)}
    claims = {
        "p-c1": Claim("p-c1", "p", ("one",), "one", ("other",)),
        "p-c2": Claim("p-c2", "p", ("two two",), "two two", ("other",)),
    }
    edges = [RelationEdge("p-c1", "p-c2", "background", 0, "gold", 2000)]
    contexts = [CitationContext("p", "x", "", "loop (x).", "")]
    corpus = Corpus(papers=papers, claims=claims, contexts=contexts,
                    edges=edges)
    mapping = ClusterMapping(
        representative={"p-c1": "p-c2", "p-c2": "p-c2"},
        clusters=(("p-c1", "p-c2"),))
    out = redirect_edges(corpus, mapping)
    assert out.edges == []
    assert list(out.claims) == ["p-c2"]


def test_redirect_deduplicates_merged_parallel_edges():
    papers = {"a": Paper("a", "t", "ACL", 2000),
              "b": Paper("b", "t", "ACL", 2001)}
    claims = {
        "a-c1": Claim("a-c1", "a", ("one",), "one", ("other",)),
        "a-c2": Claim("a-c2", "a", ("two two",), "two two", ("other",)),
        "b-c1": Claim("b-c1", "b", ("citing",), "citing", ("other",)),
    }
    contexts = [CitationContext("b", "a", "", "See (a).", "")]
    edges = [
        RelationEdge("b-c1", "a-c1", "support", 0, "gold", 2001),
        RelationEdge("b-c1", "a-c2", "support", 0, "gold", 2001),
        RelationEdge("b-c1", "a-c2", "extend", 0, "gold", 2001),
    ]
    corpus = Corpus(papers=papers, claims=claims, contexts=contexts,
                    edges=edges)
    mapping = ClusterMapping(
        representative={"a-c1": "a-c2", "a-c2": "a-c2"},
        clusters=(("a-c1", "a-c2"),))
    out = redirect_edges(corpus, mapping)
    # the two support edges collapse into one; the extend edge survives
    assert len(out.edges) == 2
    assert {e.label for e in out.edges} == {"support", "extend"}


def test_redirect_rejects_unknown_target():
    corpus = _corpus_two_papers()
    mapping = ClusterMapping(representative={"a-c1": "zz", "zz": "zz"},
                             clusters=(("a-c1", "zz"),))
    with pytest.raises(ClaimflowError):
        redirect_edges(corpus, mapping)


def test_canonicalize_recovers_planted_groups(dup_fixture):
    corpus, table, expected = dup_fixture
    result = canonicalize_corpus(corpus, table, tau=0.90)
    got = sorted(tuple(sorted(c)) for c in result.mapping.clusters)
    assert got == expected
    assert len(result.corpus.claims) == 89
    assert result.summary["claims_before"] == 100
    assert result.summary["claims_after"] == 89
    assert result.summary["merged_away"] == 11
    assert result.summary["reduction_pct"] == pytest.approx(11.0)
    assert result.summary["multi_member_clusters"] == 8
    assert result.summary["mean_cluster_size_multi"] == pytest.approx(
        19 / 8)
    assert result.summary["mean_cluster_size_all"] == pytest.approx(
        100 / 89)


def test_canonicalize_is_idempotent(dup_fixture):
    corpus, table, _ = dup_fixture
    once = canonicalize_corpus(corpus, table, tau=0.90)
    again = redirect_edges(once.corpus, once.mapping)
    assert again == once.corpus


def test_canonicalized_edges_reference_only_representatives(dup_fixture):
    corpus, table, _ = dup_fixture
    result = canonicalize_corpus(corpus, table, tau=0.90)
    survivors = set(result.corpus.claims)
    for e in result.corpus.edges:
        assert e.citing_claim_id in survivors
        assert e.cited_claim_id in survivors


def test_canonicalize_keeps_paper_set(dup_fixture):
    corpus, table, _ = dup_fixture
    result = canonicalize_corpus(corpus, table, tau=0.90)
    assert result.corpus.papers == corpus.papers


def test_tau_one_without_exact_duplicates_changes_nothing(dup_fixture):
    corpus, table, _ = dup_fixture
    result = canonicalize_corpus(corpus, table, tau=1.0)
    assert len(result.corpus.claims) == 100
    assert result.summary["merged_away"] == 0


def test_clusters_never_cross_papers(dup_fixture):
    corpus, table, _ = dup_fixture
    result = canonicalize_corpus(corpus, table, tau=0.90)
    for cluster in result.mapping.clusters:
        owners = {corpus.claims[cid].paper_id for cid in cluster}
        assert len(owners) == 1


def test_mapping_is_idempotent(dup_fixture):
    corpus, table, _ = dup_fixture
    mapping = canonicalize_corpus(corpus, table, tau=0.90).mapping
    for cid in corpus.claims:
        once = mapping.resolve(cid)
        assert mapping.resolve(once) == once


def test_embedding_table_rejects_mixed_dimensions():
    with pytest.raises(ClaimflowError):
        EmbeddingTable.from_dict({"a": (1.0, 0.0), "b": (1.0, 0.0, 0.0)})


def test_embedding_table_rejects_zero_vector():
    with pytest.raises(ClaimflowError):
        EmbeddingTable.from_dict({"a": (0.0, 0.0)})


def test_embeddings_round_trip(tmp_path):
    table = EmbeddingTable.from_dict({"a": (1.0, 0.5), "b": (0.25, -1.0)})
    path = tmp_path / "emb.jsonl"
    save_embeddings(table, path)
    again = load_embeddings(path)
    assert again.dim == 2
    assert np.array_equal(again.get("a"), table.get("a"))
    assert np.array_equal(again.get("b"), table.get("b"))


def test_mapping_round_trip(tmp_path, dup_fixture):
    corpus, table, _ = dup_fixture
    mapping = canonicalize_corpus(corpus, table, tau=0.90).mapping
    path = tmp_path / "map.jsonl"
    save_mapping(mapping, path)
    again = load_mapping(path)
    assert again.merged_pairs() == mapping.merged_pairs()
    for cid in corpus.claims:
        assert again.resolve(cid) == mapping.resolve(cid)