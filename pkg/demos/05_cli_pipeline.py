#!/usr/bin/env python3
"""Drive the claimflow CLI end to end in a scratch directory.

Same pipeline you would run in a shell:

    claimflow ingest      --input data/gold_corpus.jsonl --out work/
    claimflow build-graph --input work/corpus.jsonl      --out work/
    claimflow split       --input work/corpus.jsonl      --out work/
    claimflow analyze     --input work/graph.jsonl       --out work/
    claimflow export      --input work/graph.jsonl       --out work/
"""

import subprocess
import sys
import tempfile
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "data" / "gold_corpus.jsonl"


def run(*args):
    cmd = [sys.executable, "-m", "claimflow.cli", *args]
    print("$ claimflow " + " ".join(args))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    for line in proc.stdout.splitlines():
        print("  " + line)
    if proc.returncode != 0:
        print(proc.stderr, file=sys.stderr)
        sys.exit(proc.returncode)


with tempfile.TemporaryDirectory() as scratch:
    work = Path(scratch)

    run("ingest", "--input", str(DATA), "--out", str(work))
    run("build-graph", "--input", str(work / "corpus.jsonl"),
        "--out", str(work))
    run("split", "--input", str(work / "corpus.jsonl"), "--out", str(work))
    run("analyze", "--input", str(work / "graph.jsonl"), "--out",
        str(work), "--metrics", "relation-dist,density,challenge")
    run("export", "--input", str(work / "graph.jsonl"), "--out", str(work))

    print()
    print("artifacts:")
    for path in sorted(work.iterdir()):
        print(f"  {path.name:<28} {path.stat().st_size:>9} bytes")

    print()
    print("relation_dist.csv:")
    print((work / "relation_dist.csv").read_text())
