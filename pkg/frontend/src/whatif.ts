import { ApiClient, ApiError, WhatIfResponse } from "./api";

// Live what-if editing: local draft -> debounced request -> delta.
// At most one request is in flight; firing a newer edit aborts the older
// request, and a stale response that still arrives is dropped by its
// sequence number so it can never overwrite a newer delta.

export interface WhatIfOptions {
  debounceMs?: number;
  onResult: (result: WhatIfResponse, entry: HistoryEntry) => void;
  onError?: (error: ApiError) => void;
}

export interface HistoryEntry {
  label: string;
  removeIds: string[];
  addedCount: number;
  delta: number;
  luAfter: number;
}

export class WhatIfController {
  private removeIds = new Set<string>();
  private draftVectors: number[][] = [];
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private sequence = 0;
  readonly history: HistoryEntry[] = [];
  private readonly debounceMs: number;

  constructor(
    private client: ApiClient,
    private appId: string,
    private options: WhatIfOptions,
  ) {
    this.debounceMs = options.debounceMs ?? 300;
  }

  get draft(): { removeIds: string[]; addedDraftVectors: number[][] } {
    return {
      removeIds: [...this.removeIds].sort(),
      addedDraftVectors: this.draftVectors.map((v) => [...v]),
    };
  }

  toggleRemove(screenshotId: string): void {
    if (this.removeIds.has(screenshotId)) {
      this.removeIds.delete(screenshotId);
    } else {
      this.removeIds.add(screenshotId);
    }
    this.schedule();
  }

  isRemoved(screenshotId: string): boolean {
    return this.removeIds.has(screenshotId);
  }

  addDraftVector(vector: number[]): void {
    this.draftVectors.push([...vector]);
    this.schedule();
  }

  clearDraft(): void {
    this.removeIds.clear();
    this.draftVectors = [];
    this.schedule();
  }

  /** Debounced: rapid toggles collapse into one request. */
  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, this.debounceMs);
  }

  private label(): string {
    const removed = this.removeIds.size;
    const added = this.draftVectors.length;
    return `−${removed} screen${removed === 1 ? "" : "s"}, +${added} draft${added === 1 ? "" : "s"}`;
  }

  async fire(): Promise<void> {
    const seq = ++this.sequence;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const removeIds = [...this.removeIds];
    const addVectors = this.draftVectors.map((v) => [...v]);
    try {
      const result = await this.client.whatIf(
        { appId: this.appId, removeIds, addVectors },
        controller.signal,
      );
      if (seq !== this.sequence) return; // stale: a newer edit superseded us
      const entry: HistoryEntry = {
        label: this.label(),
        removeIds,
        addedCount: addVectors.length,
        delta: result.delta,
        luAfter: result.luAfter,
      };
      this.history.push(entry);
      this.options.onResult(result, entry);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (seq !== this.sequence) return;
      if (err instanceof ApiError) this.options.onError?.(err);
      else throw err;
    }
  }
}

/** Parse one pasted draft embedding: a JSON array or comma/space
 * separated numbers. Returns null when nothing parseable is present. */
export function parseDraftVector(text: string): number[] | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  let values: number[];
  if (trimmed.startsWith("[")) {
    try {
      const parsed = JSON.parse(trimmed) as unknown;
      if (!Array.isArray(parsed)) return null;
      values = parsed.map(Number);
    } catch {
      return null;
    }
  } else {
    values = trimmed.split(/[\s,]+/).map(Number);
  }
  if (values.length === 0 || values.some((v) => !Number.isFinite(v))) return null;
  return values;
}
