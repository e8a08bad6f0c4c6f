import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    fileParallelism: false, // one backend process at a time
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
