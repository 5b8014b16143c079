import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["./tests/global-setup.ts"],
    environment: "happy-dom",
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
