export const LABELS = [
  "support",
  "extend",
  "qualify",
  "refute",
  "background",
] as const;

export type Label = (typeof LABELS)[number];

export function isLabel(text: string): text is Label {
  return (LABELS as readonly string[]).includes(text);
}
