/** Code pane: template, settings, and body tabs over the shared state.
 *
 * The textarea always re-derives from the store snapshot; committing parses
 * the JSON and pushes it back through the store so the widget pane sees the
 * same state ("code" is just another modality). Malformed JSON stays local
 * to the pane with an inline message and no commit.
 */

import type { JsonValue, SettingsDoc, SuggestionDoc, TemplateDoc } from "./api.js";
import type { EditorStore } from "./state.js";

export type CodeTab = "template" | "settings" | "body";

const TABS: CodeTab[] = ["template", "settings", "body"];

export class CodePane {
  readonly element: HTMLElement;
  private textarea: HTMLTextAreaElement;
  private message: HTMLElement;
  private chips: HTMLElement;
  private tabButtons = new Map<CodeTab, HTMLButtonElement>();
  private active: CodeTab = "settings";

  constructor(
    private readonly store: EditorStore,
    container: HTMLElement,
  ) {
    this.element = container;
    container.classList.add("code-pane");

    const bar = document.createElement("div");
    bar.className = "tab-bar";
    for (const tab of TABS) {
      const button = document.createElement("button");
      button.className = "tab";
      button.dataset.tab = tab;
      button.textContent = tab;
      button.addEventListener("click", () => this.switchTo(tab));
      this.tabButtons.set(tab, button);
      bar.appendChild(button);
    }

    this.textarea = document.createElement("textarea");
    this.textarea.className = "code-text";
    this.textarea.addEventListener("change", () => this.commit());

    this.message = document.createElement("div");
    this.message.className = "code-message";
    this.chips = document.createElement("div");
    this.chips.className = "suggestion-chips";

    container.append(bar, this.textarea, this.message, this.chips);
    this.render();
  }

  get activeTab(): CodeTab {
    return this.active;
  }

  switchTo(tab: CodeTab): void {
    this.active = tab;
    this.render();
  }

  /** Redraw from the store; called whenever another pane committed. */
  render(): void {
    const { template, settings } = this.store.get();
    for (const [tab, button] of this.tabButtons) {
      button.classList.toggle("active", tab === this.active);
    }
    let value: unknown;
    if (this.active === "settings") {
      value = settings;
    } else if (this.active === "template") {
      value = template;
    } else {
      value = template ? template.body : null;
    }
    this.textarea.value = JSON.stringify(value, null, 2);
    this.message.textContent = "";
  }

  setText(text: string): void {
    this.textarea.value = text;
  }

  /** Parse the pane and push it into shared state. Returns false (and shows
   * the parse error) when the JSON is invalid. */
  commit(): boolean {
    let parsed: JsonValue;
    try {
      parsed = JSON.parse(this.textarea.value) as JsonValue;
    } catch (err) {
      this.message.textContent = `invalid JSON: ${(err as Error).message}`;
      this.element.classList.add("has-error");
      return false;
    }
    this.element.classList.remove("has-error");
    const problem = this.shapeProblem(parsed);
    if (problem) {
      this.message.textContent = problem;
      this.element.classList.add("has-error");
      return false;
    }
    const template = this.store.get().template;
    if (this.active === "settings") {
      this.store.commit({ settings: parsed as SettingsDoc }, "code");
    } else if (this.active === "template") {
      this.store.commit({ template: parsed as unknown as TemplateDoc }, "code");
    } else if (template) {
      this.store.commit({ template: { ...template, body: parsed } }, "code");
    }
    this.message.textContent = "";
    return true;
  }

  private shapeProblem(parsed: JsonValue): string | null {
    if (this.active === "settings") {
      if (parsed === null || typeof parsed !== "object" || Array.isArray(parsed)) {
        return "settings must be a JSON object";
      }
      return null;
    }
    if (this.active === "template") {
      if (parsed === null || typeof parsed !== "object" || Array.isArray(parsed)) {
        return "template must be a JSON object";
      }
      const doc = parsed as Record<string, JsonValue>;
      for (const key of ["name", "language", "params", "body"]) {
        if (!(key in doc)) return `template is missing "${key}"`;
      }
      if (!Array.isArray(doc.params)) return '"params" must be a list';
      return null;
    }
    return null;
  }

  /** Suggestion chips under the body tab; clicking one hands the suggestion
   * to the editor, which asks the service to apply it. */
  showSuggestions(
    suggestions: SuggestionDoc[],
    onPick: (suggestion: SuggestionDoc) => void,
  ): void {
    this.chips.textContent = "";
    for (const suggestion of suggestions) {
      const chip = document.createElement("button");
      chip.className = "chip";
      chip.dataset.suggestion = suggestion.id;
      chip.textContent = suggestion.description;
      chip.title = `${suggestion.path} → ${suggestion.replacement}`;
      chip.addEventListener("click", () => onPick(suggestion));
      this.chips.appendChild(chip);
    }
  }
}
