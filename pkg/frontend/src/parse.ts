import { LABELS, isLabel, type Label } from "./labels.js";

export type MappingRule = "exact" | "closest" | "invalid";

export interface LabelOutcome {
  raw: string;
  label: Label | "invalid";
  rule: MappingRule;
}

/**
 * Map free-form model output to a label. Never throws.
 *
 * exact: the trimmed, lowercased output equals a label.
 * closest: exactly one label occurs as a substring of the output.
 * invalid: anything else (no label, or several, which is ambiguous).
 */
export function parseLabel(raw: string): LabelOutcome {
  const normalized = raw.trim().toLowerCase();
  if (isLabel(normalized)) {
    return { raw, label: normalized, rule: "exact" };
  }
  const contained = LABELS.filter((label) => normalized.includes(label));
  if (contained.length === 1) {
    return { raw, label: contained[0], rule: "closest" };
  }
  return { raw, label: "invalid", rule: "invalid" };
}
