import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { bootstrap } from "../src/main";
import { PLAN, RETRIEVAL, fixtureService, flushMicrotasks } from "./fixtures";

function root(): HTMLElement {
  document.body.innerHTML = '<div id="app"></div>';
  return document.getElementById("app") as HTMLElement;
}

async function settle(): Promise<void> {
  // several dependent fetches resolve in sequence
  for (let i = 0; i < 6; i++) await flushMicrotasks();
}

beforeEach(() => {
  window.history.replaceState(null, "", "/");
});

describe("app explorer", () => {
  it("renders the app grid with metadata", async () => {
    const service = fixtureService();
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    const cards = document.querySelectorAll<HTMLElement>(".app-card");
    expect(cards).toHaveLength(3);
    expect(cards[0]?.textContent).toContain("alpha");
    expect(cards[0]?.textContent).toContain("ios · finance · 3 screens");
    expect(cards[0]?.textContent).toContain("-0.272"); // consistency from detail payload
  });

  it("selecting an app renders hits in exact payload order", async () => {
    const service = fixtureService();
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    document.querySelector<HTMLElement>('[data-app-id="alpha-v0"]')?.click();
    await settle();
    const hits = [...document.querySelectorAll<HTMLElement>(".retrieval-hit")];
    expect(hits.map((h) => h.dataset.targetId)).toEqual(RETRIEVAL.hits.map((h) => h.targetId));
    expect(hits.map((h) => h.dataset.score)).toEqual(RETRIEVAL.hits.map((h) => String(h.score)));
    const scores = [...document.querySelectorAll<HTMLElement>(".hit-score")];
    expect(scores.map((s) => s.textContent)).toEqual(["0.032", "0.912"]);
    expect(window.location.search).toBe("?app=alpha-v0");
  });

  it("picking a target renders the plan heatmap from the payload", async () => {
    const service = fixtureService();
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    document.querySelector<HTMLElement>('[data-app-id="alpha-v0"]')?.click();
    await settle();
    document.querySelector<HTMLElement>('[data-target-id="alpha-v1"]')?.click();
    await settle();
    const filled = [...document.querySelectorAll<HTMLElement>(".heatmap-cell.filled")];
    expect(filled.map((c) => c.dataset.mass)).toEqual(PLAN.plan.map(([, , m]) => String(m)));
    expect(document.querySelector(".plan-slot h2")?.textContent).toContain("0.032");
    expect(window.location.search).toBe("?app=alpha-v0&target=alpha-v1");
  });

  it("rebuilds the same view from URL params alone", async () => {
    window.history.replaceState(null, "", "/?app=alpha-v0&target=alpha-v1");
    const service = fixtureService();
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    expect(document.querySelectorAll(".retrieval-hit").length).toBe(2);
    expect(document.querySelectorAll(".heatmap-cell.filled").length).toBe(PLAN.plan.length);
  });

  it("shows an empty state when retrieval returns nothing", async () => {
    const service = fixtureService({ retrieval: { queryId: "alpha-v0", k: 10, hits: [] } });
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    document.querySelector<HTMLElement>('[data-app-id="alpha-v0"]')?.click();
    await settle();
    expect(document.querySelector(".retrieval-slot .empty-state")).not.toBeNull();
  });

  it("service failure surfaces a dismissible banner with the error code", async () => {
    const service = fixtureService({ failAll: 503 });
    await bootstrap(root(), { client: new ApiClient("", service.fetch) });
    await settle();
    const banner = document.querySelector<HTMLElement>(".banner");
    expect(banner).not.toBeNull();
    expect(banner?.textContent).toContain("ServiceDown");
    expect(banner?.querySelector(".banner-retry")).not.toBeNull();
    banner?.querySelector<HTMLElement>(".banner-dismiss")?.click();
    expect(document.querySelector(".banner")).toBeNull();
  });
});
