// Typed client for the engine's /v1 HTTP API. All numbers shown in the
// UI come straight from these payloads; nothing is recomputed client-side.

export interface AppDescriptor {
  id: string;
  name: string;
  platform: string;
  category: string;
  snapshotDate: string;
  screenshotCount: number;
}

export interface UniformityReport {
  setId: string;
  n: number;
  t: number;
  lu: number;
  degenerate?: boolean;
}

export interface ScreenshotRef {
  screenshotId: string;
  imagePath: string | null;
}

export interface AppDetail extends AppDescriptor {
  screenshots: ScreenshotRef[];
  uniformity: UniformityReport;
}

export interface RetrievalHit {
  targetId: string;
  score: number;
  kind: string;
  app?: AppDescriptor;
}

export interface RetrievalResult {
  queryId: string;
  k: number;
  hits: RetrievalHit[];
}

/** Sparse plan cell: [row, col, mass]. */
export type PlanCell = [number, number, number];

export interface TopPair {
  queryScreenshotId: string;
  targetScreenshotId: string;
  row: number;
  col: number;
  mass: number;
  cost: number;
}

export interface PlanPayload {
  distance: number;
  n_a: number;
  n_b: number;
  plan: PlanCell[];
  costs?: number[]; // per sparse cell, aligned with plan
  solver: string;
  converged: boolean;
  query: string;
  target: string;
  queryScreenshotIds: string[];
  targetScreenshotIds: string[];
  topPairs: TopPair[];
}

export interface WhatIfRequest {
  appId: string;
  removeIds: string[];
  addVectors?: number[][];
  addHeldOutIds?: string[];
}

export interface WhatIfResponse {
  luBefore: number;
  luAfter: number;
  delta: number;
}

export interface Healthz {
  version: string;
  datasetFingerprint: string;
  counts: { apps: number; screenshots: number };
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError("ServiceUnreachable", String(err), 0);
    }
    if (!response.ok) {
      let code = `HTTP${response.status}`;
      let message = response.statusText;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  listApps(): Promise<AppDescriptor[]> {
    return this.request("/v1/apps");
  }

  appDetail(appId: string): Promise<AppDetail> {
    return this.request(`/v1/apps/${encodeURIComponent(appId)}`);
  }

  retrieveApp(queryAppId: string, k: number): Promise<RetrievalResult> {
    return this.request("/v1/retrieve/app", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ queryAppId, k }),
    });
  }

  plan(query: string, target: string): Promise<PlanPayload> {
    const params = new URLSearchParams({ query, target });
    return this.request(`/v1/plan?${params}`);
  }

  whatIf(body: WhatIfRequest, signal?: AbortSignal): Promise<WhatIfResponse> {
    return this.request("/v1/consistency/whatif", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  healthz(): Promise<Healthz> {
    return this.request("/v1/healthz");
  }
}
