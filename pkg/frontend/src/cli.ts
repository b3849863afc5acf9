#!/usr/bin/env node
// Command-line driver: read a corpus and split produced by the analytics
// engine, label the chosen subset through a completion endpoint, write a
// prediction file the engine's eval command accepts.

import { resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";
import { EndpointError, labelBatch } from "./batch.js";
import type { CompleteFn } from "./batch.js";
import { buildTriples, readCorpus, readShots, readSplit, writePredictions } from "./files.js";
import type { Shot } from "./template.js";

const USAGE = `usage: claim-labeler --corpus FILE --split FILE --out FILE [options]

options:
  --corpus FILE       corpus records, one JSON object per line
  --split FILE        split assignment written by the engine
  --subset NAME       split subset to label (default: test)
  --out FILE          prediction file to write
  --endpoint URL      completion endpoint (or CLAIM_LABELER_ENDPOINT)
  --model NAME        model name sent to the endpoint (or CLAIM_LABELER_MODEL)
  --temperature N     sampling temperature (default: 0)
  --shots FILE        edge records to render as worked examples (max 4)
  --concurrency N     parallel requests (default: 4)
`;

interface Options {
  corpus: string;
  split: string;
  subset: string;
  out: string;
  endpoint: string;
  model: string;
  temperature: number;
  shots?: string;
  concurrency: number;
}

class UsageError extends Error {}

function parseOptions(argv: string[]): Options {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      split: { type: "string" },
      subset: { type: "string", default: "test" },
      out: { type: "string" },
      endpoint: { type: "string" },
      model: { type: "string" },
      temperature: { type: "string", default: "0" },
      shots: { type: "string" },
      concurrency: { type: "string", default: "4" },
      help: { type: "boolean", default: false },
    },
  });
  if (values.help) {
    process.stdout.write(USAGE);
    process.exit(0);
  }
  for (const name of ["corpus", "split", "out"] as const) {
    if (!values[name]) throw new UsageError(`missing required option --${name}`);
  }
  const endpoint = values.endpoint ?? process.env.CLAIM_LABELER_ENDPOINT;
  if (!endpoint) throw new UsageError("no endpoint: pass --endpoint or set CLAIM_LABELER_ENDPOINT");
  const model = values.model ?? process.env.CLAIM_LABELER_MODEL ?? "gpt-4o";
  const temperature = Number(values.temperature);
  if (!Number.isFinite(temperature)) throw new UsageError(`bad temperature: ${values.temperature}`);
  const concurrency = Number(values.concurrency);
  if (!Number.isInteger(concurrency) || concurrency < 1) {
    throw new UsageError(`bad concurrency: ${values.concurrency}`);
  }
  return {
    corpus: values.corpus as string,
    split: values.split as string,
    subset: values.subset as string,
    out: values.out as string,
    endpoint,
    model,
    temperature,
    shots: values.shots,
    concurrency,
  };
}

function makeComplete(endpoint: string, model: string, temperature: number): CompleteFn {
  return async (prompt: string) => {
    let response: Response;
    try {
      response = await fetch(endpoint, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ model, prompt, temperature }),
      });
    } catch (err) {
      throw new Error(`endpoint unreachable: ${(err as Error).message}`);
    }
    if (!response.ok) {
      throw new EndpointError(`endpoint returned ${response.status}`, response.status);
    }
    const doc = (await response.json()) as { text?: unknown };
    if (typeof doc.text !== "string") {
      throw new Error("endpoint response has no text field");
    }
    return doc.text;
  };
}

export async function main(argv: string[]): Promise<number> {
  let options: Options;
  try {
    options = parseOptions(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.stderr.write(USAGE);
    return 2;
  }
  try {
    const corpus = readCorpus(options.corpus);
    const split = readSplit(options.split);
    const triples = buildTriples(corpus, split, options.subset);
    const shots: Shot[] = options.shots ? readShots(corpus, options.shots) : [];
    const complete = makeComplete(options.endpoint, options.model, options.temperature);
    const records = await labelBatch(triples, {
      complete,
      shots,
      concurrency: options.concurrency,
    });
    writePredictions(records, options.out);
    const invalid = records.filter((r) => r.label === "invalid").length;
    process.stdout.write(`${records.length} predictions written (${invalid} invalid)\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 1;
  }
}

const entry = process.argv[1];
if (entry !== undefined && fileURLToPath(import.meta.url) === resolve(entry)) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
