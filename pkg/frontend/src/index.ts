export { LABELS, isLabel } from "./labels.js";
export type { Label } from "./labels.js";
export { loadTemplate, buildPrompt } from "./template.js";
export type { Triple, Shot } from "./template.js";
export { parseLabel } from "./parse.js";
export type { MappingRule, LabelOutcome } from "./parse.js";
export { EndpointError, labelBatch } from "./batch.js";
export type { PredRecord, CompleteFn, BatchConfig } from "./batch.js";
export {
  readCorpus,
  readSplit,
  buildTriples,
  readShots,
  writePredictions,
} from "./files.js";
export type {
  ClaimRecord,
  ContextRecord,
  EdgeRecord,
  CorpusView,
} from "./files.js";
