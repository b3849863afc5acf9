import { describe, expect, it } from "vitest";
import { EndpointError, labelBatch } from "../src/batch.js";
import type { Triple } from "../src/template.js";

function triple(n: number): Triple {
  return {
    citingClaim: `citing-${n}`,
    citedClaim: `cited-${n}`,
    contextIndex: n,
    citingText: `Citing text ${n}.`,
    citedText: `Cited text ${n}.`,
    context: `Context ${n}.`,
  };
}

const noSleep = async (_ms: number) => {};

describe("batch labeling", () => {
  it("labels every triple and carries the instance keys", async () => {
    const answers = ["support", "Label: refute.", "background"];
    let calls = 0;
    const records = await labelBatch([triple(0), triple(1), triple(2)], {
      complete: async () => answers[calls++],
      concurrency: 1,
    });
    expect(records).toEqual([
      { citing_claim: "citing-0", cited_claim: "cited-0", context_index: 0, label: "support" },
      { citing_claim: "citing-1", cited_claim: "cited-1", context_index: 1, label: "refute" },
      { citing_claim: "citing-2", cited_claim: "cited-2", context_index: 2, label: "background" },
    ]);
  });

  it("a hung request times out to invalid without sinking the batch", async () => {
    const records = await labelBatch([triple(0), triple(1), triple(2)], {
      complete: (prompt) =>
        prompt.includes("Citing text 1.")
          ? new Promise<string>(() => {})
          : Promise.resolve("extend"),
      timeoutMs: 20,
      sleep: noSleep,
    });
    expect(records.map((r) => r.label)).toEqual(["extend", "invalid", "extend"]);
  });

  it("preserves input order when completions land out of order", async () => {
    const triples = Array.from({ length: 8 }, (_, i) => triple(i));
    const complete = (prompt: string) => {
      const n = Number(/Citing text (\d+)\./.exec(prompt)![1]);
      return new Promise<string>((resolve) =>
        setTimeout(() => resolve("qualify"), (8 - n) * 5),
      );
    };
    const records = await labelBatch(triples, { complete, concurrency: 4 });
    expect(records.map((r) => r.citing_claim)).toEqual(
      triples.map((t) => t.citingClaim),
    );
    expect(records.map((r) => r.context_index)).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);
  });

  it("retries twice with exponential backoff, then succeeds", async () => {
    const sleeps: number[] = [];
    const prompts: string[] = [];
    let attempt = 0;
    const records = await labelBatch([triple(0)], {
      complete: async (prompt) => {
        prompts.push(prompt);
        if (attempt++ < 2) throw new Error("transient");
        return "refute";
      },
      sleep: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(records[0].label).toBe("refute");
    expect(sleeps).toEqual([500, 1000]);
    expect(new Set(prompts).size).toBe(1);
  });

  it("honours a custom backoff base", async () => {
    const sleeps: number[] = [];
    await labelBatch([triple(0)], {
      complete: async () => {
        throw new Error("transient");
      },
      backoffMs: 100,
      sleep: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(sleeps).toEqual([100, 200]);
  });

  it("marks an instance invalid once retries are exhausted", async () => {
    let calls = 0;
    const records = await labelBatch([triple(0), triple(1)], {
      complete: async (prompt) => {
        calls++;
        if (prompt.includes("Citing text 0.")) throw new Error("flaky");
        return "support";
      },
      sleep: noSleep,
    });
    expect(records[0].label).toBe("invalid");
    expect(records[1].label).toBe("support");
    expect(calls).toBe(4);
  });

  it("server errors are retried, not fatal", async () => {
    let failures = 0;
    const records = await labelBatch([triple(0)], {
      complete: async () => {
        if (failures++ < 1) throw new EndpointError("busy", 503);
        return "extend";
      },
      sleep: noSleep,
    });
    expect(records[0].label).toBe("extend");
  });

  it("an auth failure aborts the whole batch", async () => {
    const seen: number[] = [];
    await expect(
      labelBatch(
        Array.from({ length: 6 }, (_, i) => triple(i)),
        {
          complete: async (prompt) => {
            const n = Number(/Citing text (\d+)\./.exec(prompt)![1]);
            seen.push(n);
            if (n === 1) throw new EndpointError("unauthorized", 401);
            return "support";
          },
          concurrency: 2,
          sleep: noSleep,
        },
      ),
    ).rejects.toThrow(/unauthorized/);
    expect(seen.length).toBeLessThan(12);
  });

  it("a status-less endpoint error is fatal too", async () => {
    await expect(
      labelBatch([triple(0)], {
        complete: async () => {
          throw new EndpointError("endpoint response has no text field");
        },
        sleep: noSleep,
      }),
    ).rejects.toBeInstanceOf(EndpointError);
  });

  it("keeps at most the configured number of requests in flight", async () => {
    let inFlight = 0;
    let peak = 0;
    const complete = () => {
      inFlight++;
      peak = Math.max(peak, inFlight);
      return new Promise<string>((resolve) =>
        setTimeout(() => {
          inFlight--;
          resolve("background");
        }, 5),
      );
    };
    const records = await labelBatch(
      Array.from({ length: 9 }, (_, i) => triple(i)),
      { complete, concurrency: 2 },
    );
    expect(records).toHaveLength(9);
    expect(peak).toBeLessThanOrEqual(2);
  });

  it("renders shots into every prompt", async () => {
    const prompts: string[] = [];
    await labelBatch([triple(0)], {
      complete: async (prompt) => {
        prompts.push(prompt);
        return "support";
      },
      shots: [{ triple: triple(7), label: "qualify" }],
    });
    expect(prompts[0]).toContain("Example:");
    expect(prompts[0]).toContain("Label: qualify");
    expect(prompts[0].indexOf("Example:")).toBeLessThan(
      prompts[0].indexOf("Task:"),
    );
  });

  it("an empty batch resolves to an empty list", async () => {
    const records = await labelBatch([], {
      complete: async () => "support",
    });
    expect(records).toEqual([]);
  });
});
