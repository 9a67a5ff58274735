/** Top-level editor: wires gallery, widget pane, code pane, chart, and
 * fan-out gallery around one EditorStore and one RegistryClient.
 *
 * Flow on any commit: ask the service which parameters are visible,
 * rebuild widgets, re-derive the code pane, then apply and re-render the
 * chart. Apply runs under a superseding runner so a slow response for an
 * old state never lands on a newer one.
 */

import {
  RegistryClient,
  ServiceError,
  type ColumnInfo,
  type JsonValue,
  type SuggestionDoc,
  type TemplateDoc,
  type Transport,
} from "./api.js";
import { CodePane } from "./codepane.js";
import { FanoutGallery } from "./fanout.js";
import { renderGallery, renderRelatedPopover } from "./gallery.js";
import { renderSpec } from "./render.js";
import { EditorStore, SupersedingRunner, type PaneSource } from "./state.js";
import { renderWidgets, showWidgetErrors } from "./widgets.js";

export interface EditorOptions {
  baseUrl?: string;
  transport?: Transport;
  client?: RegistryClient;
  columns?: ColumnInfo[];
}

interface Panes {
  gallery: HTMLElement;
  widgets: HTMLElement;
  chart: HTMLElement;
  code: HTMLElement;
  fanout: HTMLElement;
  related: HTMLElement;
  toolbar: HTMLElement;
}

function pane(root: HTMLElement, name: string): HTMLElement {
  const node = document.createElement("div");
  node.className = `pane pane-${name}`;
  root.appendChild(node);
  return node;
}

export class Editor {
  readonly store = new EditorStore();
  readonly client: RegistryClient;
  readonly codePane: CodePane;
  readonly fanoutGallery: FanoutGallery;
  columns: ColumnInfo[];
  lastSpec: JsonValue | null = null;

  private panes: Panes;
  private applyRunner = new SupersedingRunner();
  private fanoutRunner = new SupersedingRunner();

  constructor(root: HTMLElement, options: EditorOptions = {}) {
    this.client =
      options.client ??
      new RegistryClient(options.baseUrl ?? "", options.transport);
    this.columns = options.columns ?? [];

    root.classList.add("ivy-editor");
    this.panes = {
      toolbar: pane(root, "toolbar"),
      gallery: pane(root, "gallery"),
      widgets: pane(root, "widgets"),
      chart: pane(root, "chart"),
      code: pane(root, "code"),
      fanout: pane(root, "fanout"),
      related: pane(root, "related"),
    };
    this.codePane = new CodePane(this.store, this.panes.code);
    this.fanoutGallery = new FanoutGallery(this.store, this.panes.fanout);
    this.buildToolbar();

    this.store.subscribe((_snapshot, source) => {
      void this.refresh(source);
    });
  }

  /** Load the catalog and show the chooser. */
  static async mount(root: HTMLElement, options: EditorOptions = {}): Promise<Editor> {
    const editor = new Editor(root, options);
    await editor.showCatalog();
    return editor;
  }

  private buildToolbar(): void {
    const mode = document.createElement("button");
    mode.className = "mode-toggle";
    mode.textContent = "mode: use";
    mode.addEventListener("click", () => {
      const next = this.store.get().mode === "use" ? "edit" : "use";
      mode.textContent = `mode: ${next}`;
      this.store.commit({ mode: next }, "widgets");
    });
    const fork = document.createElement("button");
    fork.className = "fork-output";
    fork.textContent = "fork just output";
    fork.addEventListener("click", () => void this.forkFromOutput());
    this.panes.toolbar.append(mode, fork);
  }

  async showCatalog(roles?: ColumnInfo["role"][]): Promise<void> {
    const summaries = await this.client.listTemplates(roles);
    renderGallery(this.panes.gallery, summaries, {
      onPick: (name) => void this.open(name),
    });
  }

  async open(name: string): Promise<void> {
    const template = await this.client.fetchTemplate(name);
    this.store.commit({ template, settings: {}, fanOutSelections: {} }, "gallery");
  }

  async uploadDataset(file: Blob, filename: string): Promise<void> {
    const info = await this.client.uploadDataset(file, filename);
    this.columns = info.columns;
    this.store.commit({ datasetId: info.id }, "load");
  }

  /** Serialized shared state; identical regardless of which pane edited. */
  serializeState(): string {
    return this.store.serialize();
  }

  private async refresh(source: PaneSource): Promise<void> {
    const snapshot = this.store.get();
    const template = snapshot.template;
    if (!template) return;

    // The service owns displayPredicate semantics.
    const visible = await this.client.visibleParams(template, snapshot.settings);
    renderWidgets(this.panes.widgets, template, snapshot.settings, visible, this.columns, {
      onSet: (name, value) => this.store.setValue(name, value, "widgets"),
      onClear: (name) => this.store.clearValue(name, "widgets"),
    });
    if (source !== "code") this.codePane.render();

    await this.applyCurrent(template);

    if (Object.keys(snapshot.fanOutSelections).length > 0) {
      await this.refreshFanout(template);
    }
    this.store.markRendered();
  }

  private async applyCurrent(template: TemplateDoc): Promise<void> {
    const snapshot = this.store.get();
    try {
      const spec = await this.applyRunner.run((signal) =>
        this.client.apply(template, snapshot.settings, {
          dataset: snapshot.datasetId ?? undefined,
          signal,
        }),
      );
      if (spec === null) return; // superseded by a newer edit
      this.lastSpec = spec;
      showWidgetErrors(this.panes.widgets, {});
      await renderSpec(this.panes.chart, template.language, spec);
    } catch (err) {
      if (err instanceof ServiceError) {
        const errors: Record<string, string> = {};
        for (const name of err.violatedParams()) errors[name] = err.body.message;
        if (Object.keys(errors).length === 0) {
          this.panes.chart.textContent = err.message;
        }
        showWidgetErrors(this.panes.widgets, errors);
        return;
      }
      throw err;
    }
  }

  private async refreshFanout(template: TemplateDoc): Promise<void> {
    const snapshot = this.store.get();
    const cells = await this.fanoutRunner.run((signal) =>
      this.client.fanout(template, snapshot.settings, snapshot.fanOutSelections, {
        dataset: snapshot.datasetId ?? undefined,
        signal,
      }),
    );
    if (cells === null) return;
    await this.fanoutGallery.render(cells, template);
  }

  async showRelated(): Promise<void> {
    const template = this.store.get().template;
    if (!template) return;
    const roles = this.columns.map((c) => c.role);
    const ranked = await this.client.listTemplates(roles);
    renderRelatedPopover(this.panes.related, template.name, ranked, {
      onPick: (name) => void this.open(name),
    });
  }

  /** "Fork, just output": a fresh zero-parameter template whose body is the
   * last evaluated spec; suggestion chips then drive re-abstraction. */
  async forkFromOutput(name?: string): Promise<TemplateDoc | null> {
    const current = this.store.get().template;
    if (!current || this.lastSpec === null) return null;
    const doc: TemplateDoc = {
      name: name ?? `${current.name}-output`,
      description: `Snapshot of ${current.name} output`,
      language: current.language,
      params: [],
      symbols: [],
      body: this.lastSpec,
    };
    await this.client.publish(doc);
    this.store.commit({ template: doc, settings: {}, fanOutSelections: {} }, "load");
    const suggestions = await this.client.suggest(doc.body, doc.language, this.columns);
    this.codePane.showSuggestions(suggestions, (s) => void this.applySuggestion(s));
    return doc;
  }

  /** A chip click re-abstracts via the service: the replacement lands in the
   * body and the proposed parameter becomes a new shelf. */
  private async applySuggestion(suggestion: SuggestionDoc): Promise<void> {
    const template = this.store.get().template;
    if (!template) return;
    const body = replaceAtPointer(template.body, suggestion.path, suggestion.replacement);
    const next: TemplateDoc = {
      ...template,
      params: [...template.params, suggestion.param],
      body,
    };
    this.store.commit({ template: next }, "code");
    const suggestions = await this.client.suggest(next.body, next.language, this.columns);
    this.codePane.showSuggestions(suggestions, (s) => void this.applySuggestion(s));
  }
}

/** Swap one location in a JSON tree, addressed by JSON pointer. This is a
 * text edit to the document being authored, not template evaluation. */
export function replaceAtPointer(
  doc: JsonValue,
  pointer: string,
  value: JsonValue,
): JsonValue {
  if (pointer === "") return value;
  const tokens = pointer
    .split("/")
    .slice(1)
    .map((t) => t.replace(/~1/g, "/").replace(/~0/g, "~"));
  const walk = (node: JsonValue, depth: number): JsonValue => {
    const token = tokens[depth];
    if (Array.isArray(node)) {
      const index = Number(token);
      return node.map((item, i) =>
        i === index ? (depth === tokens.length - 1 ? value : walk(item, depth + 1)) : item,
      );
    }
    if (node !== null && typeof node === "object") {
      const out: Record<string, JsonValue> = {};
      for (const [key, item] of Object.entries(node)) {
        out[key] =
          key === token
            ? depth === tokens.length - 1
              ? value
              : walk(item, depth + 1)
            : item;
      }
      return out;
    }
    return node;
  };
  return walk(doc, 0);
}
