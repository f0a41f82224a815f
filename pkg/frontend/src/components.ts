import type { ApiError, AppDescriptor, AppDetail, RetrievalResult, WhatIfResponse } from "./api";
import { deltaDirection, deltaGlyph, fmt3 } from "./format";
import type { HistoryEntry, WhatIfController } from "./whatif";
import { parseDraftVector } from "./whatif";

export function renderBanner(
  error: ApiError,
  handlers: { onDismiss: () => void; onRetry?: () => void },
): HTMLElement {
  const banner = document.createElement("div");
  banner.className = "banner";
  banner.setAttribute("role", "alert");

  const text = document.createElement("span");
  text.className = "banner-text";
  text.textContent = `${error.code}: ${error.message}`;
  banner.appendChild(text);

  if (handlers.onRetry) {
    const retry = document.createElement("button");
    retry.className = "banner-retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", handlers.onRetry);
    banner.appendChild(retry);
  }

  const dismiss = document.createElement("button");
  dismiss.className = "banner-dismiss";
  dismiss.textContent = "×";
  dismiss.setAttribute("aria-label", "Dismiss");
  dismiss.addEventListener("click", () => {
    banner.remove();
    handlers.onDismiss();
  });
  banner.appendChild(dismiss);
  return banner;
}

export function renderEmptyState(message: string): HTMLElement {
  const div = document.createElement("div");
  div.className = "empty-state";
  div.textContent = message;
  return div;
}

export function renderAppGrid(
  apps: AppDescriptor[],
  luById: Map<string, number>,
  selectedId: string | null,
  onSelect: (appId: string) => void,
): HTMLElement {
  const grid = document.createElement("div");
  grid.className = "app-grid";
  for (const app of apps) {
    const card = document.createElement("button");
    card.className = "app-card" + (app.id === selectedId ? " selected" : "");
    card.dataset.appId = app.id;

    const name = document.createElement("div");
    name.className = "app-name";
    name.textContent = app.name;

    const meta = document.createElement("div");
    meta.className = "app-meta";
    meta.textContent = `${app.platform} · ${app.category} · ${app.screenshotCount} screens`;

    const lu = document.createElement("div");
    lu.className = "app-lu";
    const value = luById.get(app.id);
    lu.textContent = value === undefined ? "Lᵤ …" : `Lᵤ ${fmt3(value)}`;

    card.append(name, meta, lu);
    card.addEventListener("click", () => onSelect(app.id));
    grid.appendChild(card);
  }
  return grid;
}

export function renderRetrievalList(
  result: RetrievalResult,
  onPickTarget: (targetId: string) => void,
): HTMLElement {
  if (result.hits.length === 0) {
    return renderEmptyState("No other apps to compare against in this dataset.");
  }
  const list = document.createElement("ol");
  list.className = "retrieval-list";
  for (const hit of result.hits) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "retrieval-hit";
    button.dataset.targetId = hit.targetId;
    button.dataset.score = String(hit.score);

    const title = document.createElement("span");
    title.className = "hit-title";
    title.textContent = hit.app ? `${hit.app.name} (${hit.app.platform})` : hit.targetId;

    const score = document.createElement("span");
    score.className = "hit-score";
    score.textContent = fmt3(hit.score);

    button.append(title, score);
    button.addEventListener("click", () => onPickTarget(hit.targetId));
    item.appendChild(button);
    list.appendChild(item);
  }
  return list;
}

export function renderDelta(delta: WhatIfResponse | null): HTMLElement {
  const box = document.createElement("div");
  box.className = "delta-box";
  if (!delta) {
    box.textContent = "Toggle screens or paste a draft embedding to preview the change.";
    return box;
  }
  const direction = deltaDirection(delta.delta);
  box.classList.add(`delta-${direction}`);

  const value = document.createElement("span");
  value.className = "delta-value";
  value.textContent = `ΔLᵤ ${fmt3(delta.delta)}`;

  const glyph = document.createElement("span");
  glyph.className = "delta-glyph";
  glyph.textContent = deltaGlyph(direction);

  const detail = document.createElement("span");
  detail.className = "delta-detail";
  detail.textContent = `before ${fmt3(delta.luBefore)} → after ${fmt3(delta.luAfter)}`;

  box.append(glyph, value, detail);
  return box;
}

export function renderHistory(entries: readonly HistoryEntry[]): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "whatif-history";
  if (entries.length === 0) return wrap;
  const heading = document.createElement("h3");
  heading.textContent = "Tried edits";
  const list = document.createElement("ol");
  list.className = "history-list";
  for (const entry of entries) {
    const item = document.createElement("li");
    item.dataset.delta = String(entry.delta);
    item.textContent = `${entry.label}: ΔLᵤ ${fmt3(entry.delta)}`;
    list.appendChild(item);
  }
  wrap.append(heading, list);
  return wrap;
}

export function renderConsistencyPanel(
  detail: AppDetail,
  controller: WhatIfController,
  lastDelta: WhatIfResponse | null,
): HTMLElement {
  const panel = document.createElement("section");
  panel.className = "consistency-panel";

  const heading = document.createElement("h2");
  heading.textContent = `Consistency — ${detail.name}`;
  const current = document.createElement("div");
  current.className = "current-lu";
  current.textContent = `Current Lᵤ ${fmt3(detail.uniformity.lu)} over ${detail.uniformity.n} screens`;

  const toggles = document.createElement("div");
  toggles.className = "screen-toggles";
  for (const shot of detail.screenshots) {
    const toggle = document.createElement("button");
    toggle.className = "screen-toggle" + (controller.isRemoved(shot.screenshotId) ? " removed" : "");
    toggle.dataset.screenshotId = shot.screenshotId;
    if (shot.imagePath) {
      const img = document.createElement("img");
      img.className = "pair-thumb";
      img.src = shot.imagePath;
      img.alt = shot.screenshotId;
      toggle.appendChild(img);
    } else {
      toggle.textContent = shot.screenshotId;
    }
    toggle.addEventListener("click", () => {
      toggle.classList.toggle("removed");
      controller.toggleRemove(shot.screenshotId);
    });
    toggles.appendChild(toggle);
  }

  const draftRow = document.createElement("div");
  draftRow.className = "draft-row";
  const input = document.createElement("textarea");
  input.className = "draft-input";
  input.placeholder = "Paste a draft embedding: [0.1, 0.2, …]";
  const addButton = document.createElement("button");
  addButton.className = "draft-add";
  addButton.textContent = "Add draft";
  const inputError = document.createElement("span");
  inputError.className = "draft-error";
  addButton.addEventListener("click", () => {
    const vector = parseDraftVector(input.value);
    if (!vector) {
      inputError.textContent = "Could not parse an embedding vector.";
      return;
    }
    inputError.textContent = "";
    input.value = "";
    controller.addDraftVector(vector);
  });
  draftRow.append(input, addButton, inputError);

  const deltaSlot = document.createElement("div");
  deltaSlot.className = "delta-slot";
  deltaSlot.appendChild(renderDelta(lastDelta));

  const historySlot = document.createElement("div");
  historySlot.className = "history-slot";
  historySlot.appendChild(renderHistory(controller.history));

  panel.append(heading, current, toggles, draftRow, deltaSlot, historySlot);
  return panel;
}
