import { parseLabel } from "./parse.js";
import { buildPrompt, type Shot, type Triple } from "./template.js";
import type { Label } from "./labels.js";

/** One line of the prediction file the analytics engine scores. */
export interface PredRecord {
  citing_claim: string;
  cited_claim: string;
  context_index: number;
  label: Label | "invalid";
}

export type CompleteFn = (prompt: string) => Promise<string>;

/** Unrecoverable endpoint condition; aborts the whole batch. */
export class EndpointError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "EndpointError";
  }
}

function isFatal(error: unknown): boolean {
  return (
    error instanceof EndpointError &&
    (error.status === 401 || error.status === 403 || error.status === undefined)
  );
}

export interface BatchConfig {
  complete: CompleteFn;
  shots?: Shot[];
  /** parallel in-flight requests, default 4 */
  concurrency?: number;
  /** extra attempts after the first failure, default 2 */
  retries?: number;
  /** first backoff delay; doubles per retry. default 500 */
  backoffMs?: number;
  /** per-attempt timeout, default 30000 */
  timeoutMs?: number;
  /** injectable for tests */
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

async function withTimeout(work: Promise<string>, ms: number): Promise<string> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const expiry = new Promise<never>((_, reject) => {
    timer = setTimeout(() => reject(new Error(`timeout after ${ms}ms`)), ms);
  });
  try {
    return await Promise.race([work, expiry]);
  } finally {
    clearTimeout(timer);
  }
}

async function labelOne(
  triple: Triple,
  config: Required<Pick<BatchConfig, "complete" | "retries" | "backoffMs" | "timeoutMs" | "sleep">> & {
    shots: Shot[];
  },
): Promise<Label | "invalid"> {
  const prompt = buildPrompt(triple, config.shots);
  for (let attempt = 0; attempt <= config.retries; attempt++) {
    try {
      const text = await withTimeout(
        config.complete(prompt),
        config.timeoutMs,
      );
      return parseLabel(text).label;
    } catch (error) {
      if (isFatal(error)) throw error;
      if (attempt < config.retries) {
        await config.sleep(config.backoffMs * 2 ** attempt);
      }
    }
  }
  // retries exhausted: the instance scores as incorrect downstream
  return "invalid";
}

/**
 * Label every triple, bounded-parallel. Output order equals input
 * order regardless of completion order. Per-instance failures become
 * "invalid" records after retries; an auth or endpoint-level failure
 * aborts the batch.
 */
export async function labelBatch(
  triples: Triple[],
  config: BatchConfig,
): Promise<PredRecord[]> {
  const settings = {
    complete: config.complete,
    shots: config.shots ?? [],
    retries: config.retries ?? 2,
    backoffMs: config.backoffMs ?? 500,
    timeoutMs: config.timeoutMs ?? 30_000,
    sleep: config.sleep ?? defaultSleep,
  };
  const concurrency = Math.max(1, config.concurrency ?? 4);
  const results = new Array<PredRecord>(triples.length);
  let next = 0;
  let aborted: unknown;

  async function worker(): Promise<void> {
    while (!aborted) {
      const index = next++;
      if (index >= triples.length) return;
      const triple = triples[index];
      try {
        const label = await labelOne(triple, settings);
        results[index] = {
          citing_claim: triple.citingClaim,
          cited_claim: triple.citedClaim,
          context_index: triple.contextIndex,
          label,
        };
      } catch (error) {
        aborted = aborted ?? error;
        return;
      }
    }
  }

  const workers = Array.from(
    { length: Math.min(concurrency, triples.length) },
    () => worker(),
  );
  await Promise.all(workers);
  if (aborted) throw aborted;
  return results;
}
