import type { PlanPayload, RetrievalResult, WhatIfResponse } from "./api";

// The server is the single source of truth: this state only mirrors the
// last payloads plus local (unsubmitted) what-if edits. Refreshing the
// page rebuilds everything from the URL params alone.

export interface WhatIfDraft {
  removeIds: string[];
  addedDraftVectors: number[][];
}

export interface ViewState {
  selectedAppId: string | null;
  targetAppId: string | null;
  retrieval: RetrievalResult | null;
  plan: PlanPayload | null;
  draft: WhatIfDraft;
  lastDelta: WhatIfResponse | null;
}

export function emptyViewState(): ViewState {
  return {
    selectedAppId: null,
    targetAppId: null,
    retrieval: null,
    plan: null,
    draft: { removeIds: [], addedDraftVectors: [] },
    lastDelta: null,
  };
}

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners = new Set<Listener>();

  constructor(initial: ViewState = emptyViewState()) {
    this.state = initial;
  }

  get(): ViewState {
    return this.state;
  }

  set(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}

export interface Selection {
  app: string | null;
  target: string | null;
}

export function selectionFromUrl(search: string): Selection {
  const params = new URLSearchParams(search);
  return { app: params.get("app"), target: params.get("target") };
}

export function urlFromSelection(selection: Selection): string {
  const params = new URLSearchParams();
  if (selection.app) params.set("app", selection.app);
  if (selection.target) params.set("target", selection.target);
  const text = params.toString();
  return text ? `?${text}` : "";
}
