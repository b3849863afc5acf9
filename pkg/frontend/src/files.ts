/**
 * File plumbing against the analytics engine's NDJSON formats. This is
 * the only coupling between the labeler and the engine: corpus bundles
 * and split files in, prediction records out.
 */

import { readFileSync, writeFileSync } from "node:fs";
import type { Label } from "./labels.js";
import { isLabel } from "./labels.js";
import type { PredRecord } from "./batch.js";
import type { Shot, Triple } from "./template.js";

export interface ClaimRecord {
  kind: "claim";
  id: string;
  paper: string;
  canonical: string;
}

export interface ContextRecord {
  kind: "context";
  pre: string;
  sent: string;
  post: string;
}

export interface EdgeRecord {
  kind: "edge";
  citing_claim: string;
  cited_claim: string;
  label: string;
  context_index: number;
}

export interface CorpusView {
  claims: Map<string, ClaimRecord>;
  contexts: ContextRecord[];
  edges: EdgeRecord[];
}

function parseLines(path: string): unknown[] {
  const out: unknown[] = [];
  for (const line of readFileSync(path, "utf8").split("\n")) {
    if (line.trim() === "") continue;
    out.push(JSON.parse(line));
  }
  return out;
}

export function readCorpus(path: string): CorpusView {
  const claims = new Map<string, ClaimRecord>();
  const contexts: ContextRecord[] = [];
  const edges: EdgeRecord[] = [];
  for (const record of parseLines(path) as { kind?: string }[]) {
    if (record.kind === "claim") claims.set((record as ClaimRecord).id, record as ClaimRecord);
    else if (record.kind === "context") contexts.push(record as ContextRecord);
    else if (record.kind === "edge") edges.push(record as EdgeRecord);
  }
  return { claims, contexts, edges };
}

export function readSplit(path: string): Map<string, string> {
  const doc = JSON.parse(readFileSync(path, "utf8")) as {
    assignment: Record<string, string>;
  };
  return new Map(Object.entries(doc.assignment));
}

function joinContext(ctx: ContextRecord): string {
  return [ctx.pre, ctx.sent, ctx.post].filter((s) => s !== "").join(" ");
}

function tripleOf(corpus: CorpusView, edge: EdgeRecord): Triple {
  const citing = corpus.claims.get(edge.citing_claim);
  const cited = corpus.claims.get(edge.cited_claim);
  if (!citing || !cited) {
    throw new Error(
      `edge references unknown claim ${edge.citing_claim} -> ${edge.cited_claim}`,
    );
  }
  const ctx = corpus.contexts[edge.context_index];
  if (!ctx) {
    throw new Error(`edge references missing context ${edge.context_index}`);
  }
  return {
    citingClaim: edge.citing_claim,
    citedClaim: edge.cited_claim,
    contextIndex: edge.context_index,
    citingText: citing.canonical,
    citedText: cited.canonical,
    context: joinContext(ctx),
  };
}

/** Unlabeled instances for one split, in corpus edge order. */
export function buildTriples(
  corpus: CorpusView,
  split: Map<string, string>,
  subset: string,
): Triple[] {
  const out: Triple[] = [];
  for (const edge of corpus.edges) {
    const citing = corpus.claims.get(edge.citing_claim);
    if (citing && split.get(citing.paper) === subset) {
      out.push(tripleOf(corpus, edge));
    }
  }
  return out;
}

/**
 * Demonstration examples from an explicit shot file (engine edge
 * records, typically a hand-picked slice of the train split). Taken in
 * file order, at most four.
 */
export function readShots(corpus: CorpusView, path: string): Shot[] {
  const shots: Shot[] = [];
  for (const record of parseLines(path) as EdgeRecord[]) {
    if (record.kind !== "edge") continue;
    if (!isLabel(record.label)) {
      throw new Error(`shot file has unknown label ${record.label}`);
    }
    shots.push({
      triple: tripleOf(corpus, record),
      label: record.label as Label,
    });
    if (shots.length === 4) break;
  }
  return shots;
}

export function writePredictions(records: PredRecord[], path: string): void {
  const lines = records.map((r) =>
    JSON.stringify({
      cited_claim: r.cited_claim,
      citing_claim: r.citing_claim,
      context_index: r.context_index,
      kind: "pred",
      label: r.label,
    }),
  );
  writeFileSync(path, lines.join("\n") + "\n");
}
