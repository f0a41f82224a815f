// A tiny in-memory stand-in for the engine's /v1 API, close enough to
// the real payload shapes for contract tests.
import type {
  AppDescriptor,
  AppDetail,
  FetchLike,
  PlanPayload,
  RetrievalResult,
  WhatIfResponse,
} from "../src/api";

export const APPS: AppDescriptor[] = [
  {
    id: "alpha-v0",
    name: "alpha",
    platform: "ios",
    category: "finance",
    snapshotDate: "2022-01-01",
    screenshotCount: 3,
  },
  {
    id: "alpha-v1",
    name: "alpha",
    platform: "android",
    category: "finance",
    snapshotDate: "2022-06-01",
    screenshotCount: 2,
  },
  {
    id: "beta-v0",
    name: "beta",
    platform: "ios",
    category: "travel",
    snapshotDate: "2022-01-01",
    screenshotCount: 2,
  },
];

export function detailFor(id: string): AppDetail {
  const app = APPS.find((a) => a.id === id);
  if (!app) throw new Error(`fixture has no app ${id}`);
  return {
    ...app,
    screenshots: Array.from({ length: app.screenshotCount }, (_, i) => ({
      screenshotId: `s${i}`,
      imagePath: null,
    })),
    uniformity: { setId: id, n: app.screenshotCount, t: 2.0, lu: -0.271828 },
  };
}

export const RETRIEVAL: RetrievalResult = {
  queryId: "alpha-v0",
  k: 10,
  hits: [
    { targetId: "alpha-v1", score: 0.032451, kind: "otDistance", app: APPS[1] },
    { targetId: "beta-v0", score: 0.912345, kind: "otDistance", app: APPS[2] },
  ],
};

export const PLAN: PlanPayload = {
  distance: 0.032451,
  n_a: 3,
  n_b: 2,
  plan: [
    [0, 0, 0.3333333333333333],
    [1, 0, 0.16666666666666666],
    [1, 1, 0.16666666666666663],
    [2, 1, 0.3333333333333333],
  ],
  costs: [0.01, 0.04, 0.02, 0.05],
  solver: "exact",
  converged: true,
  query: "alpha-v0",
  target: "alpha-v1",
  queryScreenshotIds: ["s0", "s1", "s2"],
  targetScreenshotIds: ["s0", "s1"],
  topPairs: [
    { queryScreenshotId: "s0", targetScreenshotId: "s0", row: 0, col: 0, mass: 0.3333333333333333, cost: 0.01 },
    { queryScreenshotId: "s2", targetScreenshotId: "s1", row: 2, col: 1, mass: 0.3333333333333333, cost: 0.05 },
    { queryScreenshotId: "s1", targetScreenshotId: "s0", row: 1, col: 0, mass: 0.16666666666666666, cost: 0.04 },
    { queryScreenshotId: "s1", targetScreenshotId: "s1", row: 1, col: 1, mass: 0.16666666666666663, cost: 0.02 },
  ],
};

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface FixtureOptions {
  /** Compute the what-if response; defaults to delta 0 on any edit. */
  whatIf?: (body: { removeIds: string[]; addVectors?: number[][] }) => WhatIfResponse;
  /** Force every route to fail with this status. */
  failAll?: number;
  retrieval?: RetrievalResult;
}

export interface FixtureService {
  fetch: FetchLike;
  calls: { url: string; body: unknown }[];
}

export function fixtureService(options: FixtureOptions = {}): FixtureService {
  const calls: { url: string; body: unknown }[] = [];

  const fetchFn: FetchLike = async (url, init) => {
    const body = init?.body ? (JSON.parse(String(init.body)) as unknown) : null;
    calls.push({ url, body });
    if (options.failAll) {
      return json({ code: "ServiceDown", message: "maintenance" }, options.failAll);
    }
    const path = url.split("?")[0] ?? url;
    if (path === "/v1/apps") return json(APPS);
    if (path.startsWith("/v1/apps/")) {
      const id = decodeURIComponent(path.slice("/v1/apps/".length));
      if (!APPS.some((a) => a.id === id)) {
        return json({ code: "UnknownAppId", message: `no app ${id}` }, 404);
      }
      return json(detailFor(id));
    }
    if (path === "/v1/retrieve/app") return json(options.retrieval ?? RETRIEVAL);
    if (path === "/v1/plan") return json(PLAN);
    if (path === "/v1/consistency/whatif") {
      const request = body as { removeIds: string[]; addVectors?: number[][] };
      const response = options.whatIf
        ? options.whatIf(request)
        : { luBefore: -0.271828, luAfter: -0.271828, delta: 0.0 };
      return json(response);
    }
    return json({ code: "UnknownRoute", message: path }, 404);
  };

  return { fetch: fetchFn, calls };
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
