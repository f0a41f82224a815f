import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { fixtureService } from "./fixtures";

describe("ApiClient", () => {
  it("hits the expected routes", async () => {
    const service = fixtureService();
    const client = new ApiClient("", service.fetch);
    await client.listApps();
    await client.appDetail("alpha-v0");
    await client.retrieveApp("alpha-v0", 5);
    await client.plan("alpha-v0", "alpha-v1");
    await client.whatIf({ appId: "alpha-v0", removeIds: ["s0"] });
    const urls = service.calls.map((c) => c.url);
    expect(urls).toEqual([
      "/v1/apps",
      "/v1/apps/alpha-v0",
      "/v1/retrieve/app",
      "/v1/plan?query=alpha-v0&target=alpha-v1",
      "/v1/consistency/whatif",
    ]);
  });

  it("sends retrieval parameters in the body", async () => {
    const service = fixtureService();
    const client = new ApiClient("", service.fetch);
    await client.retrieveApp("beta-v0", 7);
    expect(service.calls[0]?.body).toEqual({ queryAppId: "beta-v0", k: 7 });
  });

  it("surfaces the error envelope as ApiError", async () => {
    const service = fixtureService();
    const client = new ApiClient("", service.fetch);
    const err = await client.appDetail("ghost").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("UnknownAppId");
    expect((err as ApiError).status).toBe(404);
  });

  it("maps network failure to ServiceUnreachable", async () => {
    const client = new ApiClient("", () => Promise.reject(new TypeError("connection refused")));
    const err = await client.listApps().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe("ServiceUnreachable");
    expect((err as ApiError).status).toBe(0);
  });
});
