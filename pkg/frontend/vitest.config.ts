import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globals: true,
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    // integration setup compiles an article and spawns the sync server
    hookTimeout: 120_000,
  },
});
