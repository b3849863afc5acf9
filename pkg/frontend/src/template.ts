/**
 * Prompt rendering against the versioned template fixtures.
 *
 * The template files under templates/ are the contract: rendering is a
 * pure function of (triple, shots, template bytes), and tests hold the
 * output byte-for-byte against the fixtures. Do not "clean up" the
 * fixture whitespace.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { Label } from "./labels.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const TEMPLATE_DIR = join(HERE, "..", "templates");

export interface Triple {
  citingClaim: string;
  citedClaim: string;
  contextIndex: number;
  /** citing claim canonical text */
  citingText: string;
  /** cited claim canonical text */
  citedText: string;
  /** the three context sentences joined with single spaces */
  context: string;
}

export interface Shot {
  triple: Triple;
  label: Label;
}

export function loadTemplate(name: "base_prompt" | "shot_block"): string {
  return readFileSync(join(TEMPLATE_DIR, `${name}.txt`), "utf8");
}

// function replacers so "$" sequences in claim text stay literal
function fill(template: string, triple: Triple): string {
  return template
    .replaceAll("{cited_claim}", () => triple.citedText)
    .replaceAll("{citing_claim}", () => triple.citingText)
    .replaceAll("{citation_context}", () => triple.context);
}

function requireFields(triple: Triple): void {
  for (const field of ["citedText", "citingText", "context"] as const) {
    if (!triple[field]) {
      throw new Error(`triple is missing ${field}`);
    }
  }
}

/**
 * Render the prompt for one triple. Shot blocks precede the query block
 * in the order given; the query block is the base template with its
 * three slots filled. Zero shots reproduces the base template exactly.
 */
export function buildPrompt(triple: Triple, shots: Shot[] = []): string {
  requireFields(triple);
  if (shots.length > 4) {
    throw new Error(`at most 4 shots, got ${shots.length}`);
  }
  const shotTemplate = shots.length > 0 ? loadTemplate("shot_block") : "";
  let rendered = "";
  for (const shot of shots) {
    requireFields(shot.triple);
    rendered += fill(shotTemplate, shot.triple).replaceAll(
      "{label}",
      () => shot.label,
    );
  }
  return rendered + fill(loadTemplate("base_prompt"), triple);
}
