import { ApiClient, ApiError } from "./api";
import type { AppDescriptor, PlanPayload, WhatIfResponse } from "./api";
import {
  renderAppGrid,
  renderBanner,
  renderConsistencyPanel,
  renderEmptyState,
  renderRetrievalList,
} from "./components";
import { fmt3 } from "./format";
import { buildHeatmapModel, renderHeatmap, renderTopPairs } from "./heatmap";
import { Store, selectionFromUrl, urlFromSelection } from "./state";
import { WhatIfController } from "./whatif";

const RETRIEVE_K = 10;

export interface AppOptions {
  client?: ApiClient;
  window?: Window;
}

/** Wire the whole single-page app into `root`. The view is a pure
 * function of URL params + server payloads, so a refresh lands on the
 * same screen. */
export async function bootstrap(root: HTMLElement, options: AppOptions = {}): Promise<void> {
  const win = options.window ?? window;
  const client = options.client ?? new ApiClient("");
  const store = new Store();

  let apps: AppDescriptor[] = [];
  const luById = new Map<string, number>();
  let controller: WhatIfController | null = null;

  const bannerSlot = document.createElement("div");
  bannerSlot.className = "banner-slot";
  const gridSlot = document.createElement("div");
  const mainSlot = document.createElement("main");
  mainSlot.className = "main-columns";
  const retrievalSlot = document.createElement("section");
  retrievalSlot.className = "retrieval-slot";
  const planSlot = document.createElement("section");
  planSlot.className = "plan-slot";
  const consistencySlot = document.createElement("section");
  consistencySlot.className = "consistency-slot";
  mainSlot.append(retrievalSlot, planSlot, consistencySlot);
  root.replaceChildren(bannerSlot, gridSlot, mainSlot);

  function showError(error: ApiError, onRetry?: () => void): void {
    bannerSlot.appendChild(renderBanner(error, { onDismiss: () => undefined, onRetry }));
  }

  function syncUrl(): void {
    const { selectedAppId, targetAppId } = store.get();
    win.history.replaceState(null, "", win.location.pathname + urlFromSelection({ app: selectedAppId, target: targetAppId }));
  }

  function renderGrid(): void {
    gridSlot.replaceChildren(renderAppGrid(apps, luById, store.get().selectedAppId, (id) => void selectApp(id)));
  }

  function renderPlan(plan: PlanPayload): void {
    const title = document.createElement("h2");
    title.textContent = `Plan ${plan.query} → ${plan.target} · distance ${fmt3(plan.distance)}`;
    const model = buildHeatmapModel(plan);
    const heatmapOptions = {
      queryIds: plan.queryScreenshotIds,
      targetIds: plan.targetScreenshotIds,
    };
    planSlot.replaceChildren(
      title,
      renderHeatmap(model, heatmapOptions),
      renderTopPairs(plan, heatmapOptions),
    );
  }

  async function selectTarget(targetId: string): Promise<void> {
    const queryId = store.get().selectedAppId;
    if (!queryId) return;
    try {
      const plan = await client.plan(queryId, targetId);
      store.set({ targetAppId: targetId, plan });
      syncUrl();
      renderPlan(plan);
    } catch (err) {
      if (err instanceof ApiError) showError(err, () => void selectTarget(targetId));
      else throw err;
    }
  }

  async function selectApp(appId: string): Promise<void> {
    store.set({ selectedAppId: appId, targetAppId: null, plan: null, lastDelta: null });
    syncUrl();
    renderGrid();
    planSlot.replaceChildren();

    try {
      const [detail, retrieval] = await Promise.all([
        client.appDetail(appId),
        client.retrieveApp(appId, RETRIEVE_K),
      ]);
      luById.set(appId, detail.uniformity.lu);
      store.set({ retrieval });
      renderGrid();
      retrievalSlot.replaceChildren(
        Object.assign(document.createElement("h2"), { textContent: `Similar to ${detail.name}` }),
        renderRetrievalList(retrieval, (targetId) => void selectTarget(targetId)),
      );

      controller = new WhatIfController(client, appId, {
        onResult: (result: WhatIfResponse) => {
          store.set({ lastDelta: result });
          if (controller) {
            consistencySlot.replaceChildren(renderConsistencyPanel(detail, controller, result));
          }
        },
        onError: (error) => showError(error),
      });
      consistencySlot.replaceChildren(renderConsistencyPanel(detail, controller, null));
    } catch (err) {
      if (err instanceof ApiError) showError(err, () => void selectApp(appId));
      else throw err;
    }
  }

  try {
    apps = await client.listApps();
  } catch (err) {
    if (err instanceof ApiError) {
      showError(err, () => void bootstrap(root, options));
      gridSlot.replaceChildren(renderEmptyState("Service unavailable."));
      return;
    }
    throw err;
  }
  renderGrid();

  // fill the grid's consistency scores lazily; ignore individual failures
  void Promise.allSettled(
    apps.map(async (app) => {
      const detail = await client.appDetail(app.id);
      luById.set(app.id, detail.uniformity.lu);
    }),
  ).then(renderGrid);

  const initial = selectionFromUrl(win.location.search);
  if (initial.app) {
    await selectApp(initial.app);
    if (initial.target) await selectTarget(initial.target);
  }
}

declare global {
  interface Window {
    __uiotBootstrapped?: boolean;
  }
}

// auto-boot in the browser; tests import bootstrap() directly
if (typeof document !== "undefined" && document.getElementById("app") && !window.__uiotBootstrapped) {
  window.__uiotBootstrapped = true;
  void bootstrap(document.getElementById("app") as HTMLElement);
}
