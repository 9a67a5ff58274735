import { beforeEach, describe, expect, it } from "vitest";

import type { SuggestionDoc } from "../src/api.js";
import { CodePane } from "../src/codepane.js";
import { EditorStore } from "../src/state.js";
import { sortableBar } from "./helpers.js";

let store: EditorStore;
let container: HTMLElement;
let pane: CodePane;

beforeEach(() => {
  store = new EditorStore();
  container = document.createElement("div");
  document.body.appendChild(container);
  pane = new CodePane(store, container);
  store.commit({ template: sortableBar() }, "load");
  pane.render();
});

function textarea(): HTMLTextAreaElement {
  const node = container.querySelector<HTMLTextAreaElement>(".code-text");
  if (!node) throw new Error("no textarea");
  return node;
}

describe("CodePane", () => {
  it("starts on the settings tab and mirrors the store", () => {
    expect(pane.activeTab).toBe("settings");
    expect(textarea().value).toBe("{}");
    store.setValue("sort", true, "widgets");
    pane.render();
    expect(JSON.parse(textarea().value)).toEqual({ sort: true });
  });

  it("switches tabs and shows template, settings, or body", () => {
    pane.switchTo("template");
    expect(JSON.parse(textarea().value).name).toBe("sortable-bar");
    pane.switchTo("body");
    expect(JSON.parse(textarea().value).mark).toBe("bar");
    const active = container.querySelector<HTMLElement>(".tab.active");
    expect(active?.dataset.tab).toBe("body");
  });

  it("commits edited settings back through the store", () => {
    textarea().value = '{"sort": true, "year": 1900}';
    textarea().dispatchEvent(new Event("change"));
    expect(store.get().settings).toEqual({ sort: true, year: 1900 });
    // the code pane was the source, so it is the one clean pane
    expect(store.get().dirty).toEqual({ widgets: true, code: false, chart: true });
  });

  it("rejects malformed JSON with an inline message and no commit", () => {
    textarea().value = '{"sort": tru';
    const committed = pane.commit();
    expect(committed).toBe(false);
    expect(container.classList.contains("has-error")).toBe(true);
    expect(container.querySelector(".code-message")?.textContent).toMatch(/invalid JSON/);
    expect(store.get().settings).toEqual({});
  });

  it("rejects settings documents that are not objects", () => {
    textarea().value = "[1, 2]";
    expect(pane.commit()).toBe(false);
    expect(container.querySelector(".code-message")?.textContent).toMatch(/object/);
  });

  it("rejects template documents missing required fields", () => {
    pane.switchTo("template");
    textarea().value = '{"name": "x", "language": "table"}';
    expect(pane.commit()).toBe(false);
    expect(container.querySelector(".code-message")?.textContent).toMatch(/missing/);
    expect(store.get().template?.name).toBe("sortable-bar");
  });

  it("recovers once the JSON is fixed", () => {
    textarea().value = "nope";
    expect(pane.commit()).toBe(false);
    textarea().value = '{"sort": false}';
    expect(pane.commit()).toBe(true);
    expect(container.classList.contains("has-error")).toBe(false);
    expect(store.get().settings).toEqual({ sort: false });
  });

  it("commits body edits into the current template", () => {
    pane.switchTo("body");
    textarea().value = '{"mark": "line"}';
    expect(pane.commit()).toBe(true);
    expect(store.get().template?.body).toEqual({ mark: "line" });
    expect(store.get().template?.name).toBe("sortable-bar");
  });

  it("renders suggestion chips and forwards clicks", () => {
    const picked: string[] = [];
    const suggestion: SuggestionDoc = {
      id: "data-field:/encoding/x/field",
      description: 'abstract data field "age"',
      path: "/encoding/x/field",
      kind: "AbstractDataField",
      param: { name: "field", type: "DataTarget" },
      replacement: "[field]",
      original: "age",
    };
    pane.showSuggestions([suggestion], (s) => picked.push(s.id));
    const chip = container.querySelector<HTMLButtonElement>(".chip");
    expect(chip?.textContent).toBe('abstract data field "age"');
    chip?.click();
    expect(picked).toEqual(["data-field:/encoding/x/field"]);
  });
});
