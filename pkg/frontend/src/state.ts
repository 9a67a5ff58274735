/** The shared editor state.
 *
 * Code pane and widgets both derive from one snapshot and commit back to it
 * before the other re-renders, so neither modality can drift. serialize()
 * is normalized (parameter declaration order) so identical states print
 * identically no matter which pane produced them.
 */

import type { JsonValue, SettingsDoc, TemplateDoc } from "./api.js";

export type Mode = "use" | "edit";
export type PaneSource = "widgets" | "code" | "gallery" | "load";

export interface DirtyFlags {
  widgets: boolean;
  code: boolean;
  chart: boolean;
}

export interface EditorSnapshot {
  template: TemplateDoc | null;
  settings: SettingsDoc;
  datasetId: string | null;
  mode: Mode;
  fanOutSelections: Record<string, JsonValue[]>;
  dirty: DirtyFlags;
}

export interface StatePatch {
  template?: TemplateDoc | null;
  settings?: SettingsDoc;
  datasetId?: string | null;
  mode?: Mode;
  fanOutSelections?: Record<string, JsonValue[]>;
}

export type Listener = (snapshot: EditorSnapshot, source: PaneSource) => void;

const CLEAN: DirtyFlags = { widgets: false, code: false, chart: false };

export class EditorStore {
  private snapshot: EditorSnapshot = {
    template: null,
    settings: {},
    datasetId: null,
    mode: "use",
    fanOutSelections: {},
    dirty: { ...CLEAN },
  };
  private listeners = new Set<Listener>();

  get(): EditorSnapshot {
    return this.snapshot;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  /** Apply a patch on behalf of one pane; the other panes become dirty. */
  commit(patch: StatePatch, source: PaneSource): EditorSnapshot {
    const dirty: DirtyFlags = {
      widgets: source !== "widgets",
      code: source !== "code",
      chart: true,
    };
    this.snapshot = { ...this.snapshot, ...patch, dirty };
    for (const listener of [...this.listeners]) listener(this.snapshot, source);
    return this.snapshot;
  }

  setValue(name: string, value: JsonValue, source: PaneSource): EditorSnapshot {
    const settings = { ...this.snapshot.settings, [name]: value };
    return this.commit({ settings }, source);
  }

  clearValue(name: string, source: PaneSource): EditorSnapshot {
    const settings = { ...this.snapshot.settings };
    delete settings[name];
    return this.commit({ settings }, source);
  }

  markRendered(): void {
    this.snapshot = { ...this.snapshot, dirty: { ...CLEAN } };
  }

  /** Canonical text of the state; the two-way sync tests compare these. */
  serialize(): string {
    const { template, settings, datasetId, mode, fanOutSelections } = this.snapshot;
    return JSON.stringify(
      {
        template: template ? { name: template.name, version: template.version ?? null } : null,
        settings: orderByParams(settings, template),
        dataset: datasetId,
        mode,
        fanOut: orderByParams(fanOutSelections, template),
      },
      null,
      2,
    );
  }
}

/** Re-key an object in template parameter declaration order; keys that are
 * not parameters (for example "$filters") follow, sorted. */
function orderByParams<V>(
  values: Record<string, V>,
  template: TemplateDoc | null,
): Record<string, V> {
  const declared = template ? template.params.map((p) => p.name) : [];
  const ordered: Record<string, V> = {};
  for (const name of declared) {
    if (name in values) ordered[name] = values[name];
  }
  for (const name of Object.keys(values).sort()) {
    if (!(name in ordered)) ordered[name] = values[name];
  }
  return ordered;
}

/** Runs one async task at a time; starting a new one aborts its predecessor
 * so a stale /apply response can never overwrite newer state. */
export class SupersedingRunner {
  private controller: AbortController | null = null;
  private epoch = 0;

  /** Resolves null when a newer run superseded this one. */
  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const epoch = ++this.epoch;
    try {
      const result = await task(controller.signal);
      return epoch === this.epoch ? result : null;
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    }
  }
}
