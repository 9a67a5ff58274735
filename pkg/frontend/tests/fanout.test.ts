import { beforeEach, describe, expect, it } from "vitest";

import type { FanOutCellDoc } from "../src/api.js";
import { FanoutGallery } from "../src/fanout.js";
import { EditorStore } from "../src/state.js";
import { sortableBar } from "./helpers.js";

let store: EditorStore;
let container: HTMLElement;
let gallery: FanoutGallery;

beforeEach(() => {
  store = new EditorStore();
  container = document.createElement("div");
  document.body.appendChild(container);
  gallery = new FanoutGallery(store, container);
  store.commit({ template: sortableBar() }, "load");
});

function cellsFor(selections: Record<string, unknown[]>): FanOutCellDoc[] {
  // Cartesian product helper standing in for the service response.
  let combos: Record<string, unknown>[] = [{}];
  for (const [name, values] of Object.entries(selections)) {
    const next: Record<string, unknown>[] = [];
    for (const combo of combos) {
      for (const value of values) next.push({ ...combo, [name]: value });
    }
    combos = next;
  }
  return combos.map((settings) => ({
    settings: settings as FanOutCellDoc["settings"],
    spec: { mark: "bar" },
  }));
}

describe("FanoutGallery", () => {
  it("accumulates toggled values per parameter", () => {
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 1950);
    gallery.toggleValue("sort", true);
    expect(gallery.optionSets()).toEqual({ year: [1900, 1950], sort: [true] });
    expect(gallery.expectedCells()).toBe(2);
  });

  it("removes a value on second toggle and drops empty parameters", () => {
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 1950);
    gallery.toggleValue("year", 1900);
    expect(gallery.optionSets()).toEqual({ year: [1950] });
    gallery.toggleValue("year", 1950);
    expect(gallery.optionSets()).toEqual({});
    expect(gallery.expectedCells()).toBe(1);
  });

  it("renders exactly the product of the option set sizes", async () => {
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 1950);
    gallery.toggleValue("year", 2000);
    gallery.toggleValue("sort", true);
    gallery.toggleValue("sort", false);
    const selections = gallery.optionSets() as Record<string, unknown[]>;
    await gallery.render(cellsFor(selections), sortableBar());
    expect(gallery.expectedCells()).toBe(6);
    expect(gallery.cellCount()).toBe(6);
  });

  it("labels each cell with its swept values", async () => {
    gallery.toggleValue("year", 1900);
    await gallery.render(cellsFor({ year: [1900] }), sortableBar());
    const label = container.querySelector(".cell-label");
    expect(label?.textContent).toBe("year=1900");
  });

  it("shows per-cell errors without losing the cell", async () => {
    const cells: FanOutCellDoc[] = [
      { settings: { year: 1900 }, spec: { mark: "bar" } },
      {
        settings: { year: 9999 },
        error: { error: "SettingsViolation", message: "invalid settings" },
      },
    ];
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 9999);
    await gallery.render(cells, sortableBar());
    expect(gallery.cellCount()).toBe(2);
    expect(container.querySelector(".cell-error")?.textContent).toMatch(
      /SettingsViolation/,
    );
  });

  it("removes a single cell via its control", async () => {
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 1950);
    await gallery.render(cellsFor({ year: [1900, 1950] }), sortableBar());
    expect(gallery.cellCount()).toBe(2);
    container.querySelector<HTMLButtonElement>(".cell-remove")?.click();
    expect(gallery.cellCount()).toBe(1);
    // removing a cell does not collapse the gallery
    expect(store.get().fanOutSelections).toEqual({ year: [1900, 1950] });
  });

  it("collapses onto a cell when it is selected", async () => {
    gallery.toggleValue("year", 1900);
    gallery.toggleValue("year", 1950);
    await gallery.render(cellsFor({ year: [1900, 1950] }), sortableBar());
    const second = [...container.querySelectorAll<HTMLElement>(".fanout-cell")][1];
    second.click();
    expect(store.get().settings).toEqual({ year: 1950 });
    expect(store.get().fanOutSelections).toEqual({});
    expect(gallery.cellCount()).toBe(0);
  });
});
