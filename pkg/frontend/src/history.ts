// Exploration history: the last N (design, curve, metrics) results, so
// what-if excursions can be compared and restored exactly.

import type { CurveArrays, Design, Metrics } from './types';
import type { CurveDraft } from './curve';
import { draftFromJSON } from './curve';

export interface HistoryEntry {
  design: Design;
  curve: CurveArrays;
  metrics: Metrics;
  label: string;
}

export const HISTORY_CAP = 8;

export class History {
  private entries: HistoryEntry[] = [];

  push(entry: HistoryEntry): void {
    // Deep-copy so later slider edits cannot mutate stored snapshots.
    this.entries.push(structuredClone(entry));
    if (this.entries.length > HISTORY_CAP) this.entries.shift();
  }

  get(index: number): HistoryEntry {
    const entry = this.entries[index];
    if (!entry) throw new Error(`no history entry ${index}`);
    return structuredClone(entry);
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  get length(): number {
    return this.entries.length;
  }

  clear(): void {
    this.entries = [];
  }

  toJSON(): HistoryEntry[] {
    return structuredClone(this.entries);
  }

  static fromJSON(value: unknown): History {
    if (!Array.isArray(value)) throw new Error('history: expected an array');
    const h = new History();
    for (const entry of value) h.push(entry as HistoryEntry);
    return h;
  }
}

/** Everything needed to reconstruct the UI: draft, alpha, history. */
export interface AppState {
  draft: CurveDraft;
  alpha: number;
  history: HistoryEntry[];
}

export function exportState(draft: CurveDraft, alpha: number, history: History): string {
  return JSON.stringify({ draft, alpha, history: history.toJSON() } satisfies AppState);
}

export function importState(text: string): { draft: CurveDraft; alpha: number; history: History } {
  const raw = JSON.parse(text) as AppState;
  if (typeof raw.alpha !== 'number') throw new Error('state: alpha must be a number');
  return {
    draft: draftFromJSON(raw.draft),
    alpha: raw.alpha,
    history: History.fromJSON(raw.history),
  };
}
