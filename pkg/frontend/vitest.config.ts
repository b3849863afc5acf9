import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the file suite shells out to the analytics engine CLI
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
