import json
import subprocess
import sys

import pytest

from claimflow import (
    ClaimflowError,
    METRIC_NAMES,
    build_graph,
    build_report,
    save_corpus,
    save_graph,
    save_predictions,
    save_split,
    split_edges,
    stratified_split,
)
from claimflow.cli import main
from claimflow.evaluation import PredRecord

from test_claim_graph import _corpus


# ------------------------------------------------------------- reports


def test_report_names_cover_every_metric(synthetic_graph):
    for metric in METRIC_NAMES:
        report = build_report(metric, synthetic_graph)
        assert report.metric == metric
        assert report.columns
        assert report.to_csv_text().splitlines()[0] == \
            ",".join(report.columns)
        parsed = json.loads(report.to_json_text())
        assert parsed["metric"] == metric
        assert len(parsed["rows"]) == len(report.rows)


def test_report_unknown_metric_rejected(synthetic_graph):
    with pytest.raises(ClaimflowError):
        build_report("pagerank", synthetic_graph)


def test_report_determinism(synthetic_graph):
    for metric in METRIC_NAMES:
        a = build_report(metric, synthetic_graph, seed=42)
        b = build_report(metric, synthetic_graph, seed=42)
        assert a.to_csv_text() == b.to_csv_text()
        assert a.to_json_text() == b.to_json_text()


def test_density_report_skips_single_node_years():
    # in 2000 the graph has one node; the first density row is 2001
    g = build_graph(_corpus(
        papers=[("p1", 2000), ("p2", 2001), ("p3", 2002)],
        claims=[("a", "p1"), ("b", "p2"), ("c", "p3")],
        edges=[("b", "a", "support"), ("c", "a", "extend")]))
    report = build_report("density", g)
    years = [row["year"] for row in report.rows]
    assert years == [2001, 2002]


def test_modularity_report_skips_edgeless_years():
    g = build_graph(_corpus(
        papers=[("p1", 2000), ("p2", 2001), ("p3", 2005)],
        claims=[("a", "p1"), ("b", "p2"), ("c", "p3")],
        edges=[("c", "a", "support"), ("c", "b", "extend")]))
    report = build_report("modularity", g)
    years = [row["year"] for row in report.rows]
    # no edges exist until the 2005 paper arrives
    assert years == [2005]


def test_density_report_value_is_exact():
    g = build_graph(_corpus(
        papers=[("p1", 2000), ("p2", 2000), ("p3", 2000)],
        claims=[("a", "p1"), ("b", "p2"), ("c", "p3")],
        edges=[("b", "a", "support")]))
    report = build_report("density", g)
    assert report.rows == [{"year": 2000, "nodes": 3, "distinct_pairs": 1,
                            "density": 1 / 6}]
    assert repr(1 / 6) in report.to_csv_text()


# ----------------------------------------------------------- CLI files


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory, synthetic_corpus):
    path = tmp_path_factory.mktemp("cli") / "corpus.jsonl"
    save_corpus(synthetic_corpus, path)
    return path


@pytest.fixture(scope="module")
def graph_file(tmp_path_factory, synthetic_graph):
    path = tmp_path_factory.mktemp("cli") / "graph.jsonl"
    save_graph(synthetic_graph, path)
    return path


def _bad_label_lines(corpus_file):
    lines = corpus_file.read_text().splitlines()
    out = []
    flipped = None
    for i, line in enumerate(lines):
        record = json.loads(line)
        if flipped is None and record.get("kind") == "edge":
            record["label"] = "supports"
            flipped = i + 1  # 1-based record number
            out.append(json.dumps(record, sort_keys=True,
                                  separators=(",", ":")))
        else:
            out.append(line)
    return "\n".join(out) + "\n", flipped


# ------------------------------------------------------------ CLI runs


def test_cli_ingest_clean(corpus_file, tmp_path, capsys):
    code = main(["ingest", "--input", str(corpus_file),
                 "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 0
    assert "0 violations" in captured.out
    assert (tmp_path / "corpus.jsonl").is_file()
    report = json.loads((tmp_path / "validation.json").read_text())
    assert report["violations"] == []


def test_cli_ingest_bad_label_fails(corpus_file, tmp_path, capsys):
    text, record_number = _bad_label_lines(corpus_file)
    bad = tmp_path / "bad.jsonl"
    bad.write_text(text)
    code = main(["ingest", "--input", str(bad), "--out",
                 str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 1
    assert f"record {record_number}" in captured.err
    assert "unknown-label" in captured.err
    assert not (tmp_path / "out" / "corpus.jsonl").exists()
    # the validation report is still written for inspection
    assert (tmp_path / "out" / "validation.json").is_file()


def test_cli_ingest_lenient_drops_and_succeeds(corpus_file, tmp_path,
                                               capsys):
    text, record_number = _bad_label_lines(corpus_file)
    bad = tmp_path / "bad.jsonl"
    bad.write_text(text)
    code = main(["ingest", "--input", str(bad), "--out",
                 str(tmp_path / "out"), "--lenient"])
    captured = capsys.readouterr()
    assert code == 0
    assert "0 violations (1 records dropped)" in captured.out
    assert (tmp_path / "out" / "corpus.jsonl").is_file()


def test_cli_unknown_metric_is_usage_error(graph_file, tmp_path, capsys):
    code = main(["analyze", "--input", str(graph_file), "--out",
                 str(tmp_path), "--metrics", "pagerank"])
    captured = capsys.readouterr()
    assert code == 2
    assert "pagerank" in captured.err


def test_cli_missing_input_is_io_error(tmp_path, capsys):
    code = main(["analyze", "--input", str(tmp_path / "nope.jsonl"),
                 "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 3
    assert "not found" in captured.err


def test_cli_analyze_reruns_byte_identical(graph_file, tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["analyze", "--input", str(graph_file), "--out",
                 str(out_a)]) == 0
    assert main(["analyze", "--input", str(graph_file), "--out",
                 str(out_b)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in out_a.iterdir())
    assert names == sorted(p.name for p in out_b.iterdir())
    assert len(names) == 2 * len(METRIC_NAMES)
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_cli_analyze_metric_subset(graph_file, tmp_path, capsys):
    code = main(["analyze", "--input", str(graph_file), "--out",
                 str(tmp_path), "--metrics", "density,relation-dist"])
    capsys.readouterr()
    assert code == 0
    produced = sorted(p.name for p in tmp_path.iterdir())
    assert produced == ["density.csv", "density.json",
                        "relation_dist.csv", "relation_dist.json"]


def test_cli_split_then_eval_perfect(corpus_file, synthetic_corpus,
                                     tmp_path, capsys):
    out = tmp_path / "artifacts"
    assert main(["split", "--input", str(corpus_file), "--out",
                 str(out)]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("train=")

    assignment = stratified_split(synthetic_corpus, seed=42)
    gold = split_edges(synthetic_corpus, assignment, "test")
    assert gold, "test split must hold some gold edges"
    preds = [PredRecord(e.citing_claim_id, e.cited_claim_id,
                        e.context_index, e.label) for e in gold]
    pred_file = tmp_path / "preds.jsonl"
    save_predictions(preds, pred_file)

    code = main(["eval", "--input", str(corpus_file), "--split",
                 str(out / "split.json"), "--pred", str(pred_file),
                 "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.strip() == "1.000\t1.000\t1.000"
    doc = json.loads((out / "eval.json").read_text())
    assert doc["macro"]["f1"] == 1.0
    assert doc["invalid_predictions"] == 0


def test_cli_eval_missing_pred_key(corpus_file, synthetic_corpus,
                                   tmp_path, capsys):
    assignment = stratified_split(synthetic_corpus, seed=42)
    split_file = tmp_path / "split.json"
    save_split(assignment, split_file)
    gold = split_edges(synthetic_corpus, assignment, "test")
    preds = [PredRecord(e.citing_claim_id, e.cited_claim_id,
                        e.context_index, e.label) for e in gold[:-1]]
    pred_file = tmp_path / "preds.jsonl"
    save_predictions(preds, pred_file)
    code = main(["eval", "--input", str(corpus_file), "--split",
                 str(split_file), "--pred", str(pred_file), "--out",
                 str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 2
    assert "unpredicted" in captured.err


def test_cli_env_out_overrides_flag(graph_file, tmp_path, monkeypatch,
                                    capsys):
    env_dir = tmp_path / "env"
    flag_dir = tmp_path / "flag"
    monkeypatch.setenv("CLAIMFLOW_OUT", str(env_dir))
    code = main(["analyze", "--input", str(graph_file), "--out",
                 str(flag_dir), "--metrics", "density"])
    capsys.readouterr()
    assert code == 0
    assert (env_dir / "density.csv").is_file()
    assert not flag_dir.exists()


def test_cli_no_out_anywhere_is_usage_error(graph_file, monkeypatch,
                                            capsys):
    monkeypatch.delenv("CLAIMFLOW_OUT", raising=False)
    code = main(["analyze", "--input", str(graph_file), "--metrics",
                 "density"])
    captured = capsys.readouterr()
    assert code == 2
    assert "output directory" in captured.err


def test_cli_density_csv_value(tmp_path, capsys):
    corpus = _corpus(
        papers=[("p1", 2000), ("p2", 2000), ("p3", 2000)],
        claims=[("a", "p1"), ("b", "p2"), ("c", "p3")],
        edges=[("b", "a", "support")])
    graph_path = tmp_path / "graph.jsonl"
    save_graph(build_graph(corpus), graph_path)
    code = main(["analyze", "--input", str(graph_path), "--out",
                 str(tmp_path), "--metrics", "density"])
    capsys.readouterr()
    assert code == 0
    lines = (tmp_path / "density.csv").read_text().splitlines()
    assert lines[0] == "year,nodes,distinct_pairs,density"
    assert lines[1] == f"2000,3,1,{1 / 6!r}"


def test_cli_inputs_never_mutated(corpus_file, graph_file, tmp_path,
                                  capsys):
    corpus_before = corpus_file.read_bytes()
    graph_before = graph_file.read_bytes()
    main(["ingest", "--input", str(corpus_file), "--out",
          str(tmp_path / "i")])
    main(["analyze", "--input", str(graph_file), "--out",
          str(tmp_path / "a")])
    main(["export", "--input", str(graph_file), "--out",
          str(tmp_path / "e")])
    capsys.readouterr()
    assert corpus_file.read_bytes() == corpus_before
    assert graph_file.read_bytes() == graph_before


def test_cli_export_tables(graph_file, synthetic_graph, tmp_path, capsys):
    code = main(["export", "--input", str(graph_file), "--out",
                 str(tmp_path)])
    capsys.readouterr()
    assert code == 0
    nodes = (tmp_path / "nodes.csv").read_text().splitlines()
    edges = (tmp_path / "edges.csv").read_text().splitlines()
    papers = (tmp_path / "papers.csv").read_text().splitlines()
    assert len(nodes) == 1 + synthetic_graph.node_count
    assert len(edges) == 1 + synthetic_graph.edge_count
    assert len(papers) == 1 + len(synthetic_graph.papers)
    assert nodes[0] == "claim,paper,year"


def test_cli_help_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "claimflow.cli", "--help"],
        capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    for name in ("ingest", "canonicalize", "build-graph", "split",
                 "analyze", "eval", "export"):
        assert name in proc.stdout