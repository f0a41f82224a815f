import { defineConfig } from "vite";

export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
  server: {
    // dev-mode proxy to a locally running engine
    proxy: {
      "/v1": "http://127.0.0.1:8080",
    },
  },
});
