/** Fan-out gallery: pick several values per parameter, render the cartesian
 * product the service returns, one cell per combination.
 *
 * Each cell carries a remove control, and clicking a cell collapses the
 * gallery onto that combination (its settings become the current
 * settings).
 */

import type { FanOutCellDoc, JsonValue, TemplateDoc } from "./api.js";
import type { EditorStore } from "./state.js";
import { renderSpec } from "./render.js";

export class FanoutGallery {
  readonly element: HTMLElement;
  private grid: HTMLElement;

  constructor(
    private readonly store: EditorStore,
    container: HTMLElement,
  ) {
    this.element = container;
    container.classList.add("fanout-gallery");
    this.grid = document.createElement("div");
    this.grid.className = "fanout-grid";
    container.appendChild(this.grid);
  }

  /** Toggle one candidate value for a parameter. */
  toggleValue(param: string, value: JsonValue): void {
    const selections = { ...this.store.get().fanOutSelections };
    const current = selections[param] ?? [];
    const text = JSON.stringify(value);
    const without = current.filter((v) => JSON.stringify(v) !== text);
    if (without.length === current.length) {
      selections[param] = [...current, value];
    } else if (without.length > 0) {
      selections[param] = without;
    } else {
      delete selections[param];
    }
    this.store.commit({ fanOutSelections: selections }, "widgets");
  }

  /** The optionSets payload for POST /fanout. */
  optionSets(): Record<string, JsonValue[]> {
    return this.store.get().fanOutSelections;
  }

  expectedCells(): number {
    let product = 1;
    for (const values of Object.values(this.store.get().fanOutSelections)) {
      product *= values.length;
    }
    return product;
  }

  cellCount(): number {
    return this.grid.querySelectorAll(".fanout-cell").length;
  }

  /** Render the service's cells; the grid holds exactly one cell per
   * combination, including failed ones (shown with their error). */
  async render(cells: FanOutCellDoc[], template: TemplateDoc): Promise<void> {
    this.grid.textContent = "";
    for (const cell of cells) {
      this.grid.appendChild(await this.cellNode(cell, template));
    }
  }

  private async cellNode(cell: FanOutCellDoc, template: TemplateDoc): Promise<HTMLElement> {
    const node = document.createElement("div");
    node.className = "fanout-cell";

    const label = document.createElement("div");
    label.className = "cell-label";
    const swept = Object.keys(this.store.get().fanOutSelections);
    label.textContent = swept
      .map((name) => `${name}=${JSON.stringify(cell.settings[name])}`)
      .join(" ");
    node.appendChild(label);

    const remove = document.createElement("button");
    remove.className = "cell-remove";
    remove.textContent = "×";
    remove.addEventListener("click", (event) => {
      event.stopPropagation();
      node.remove();
    });
    node.appendChild(remove);

    const body = document.createElement("div");
    body.className = "cell-body";
    if (cell.error) {
      body.classList.add("cell-error");
      body.textContent = `${cell.error.error}: ${cell.error.message}`;
    } else {
      await renderSpec(body, template.language, cell.spec ?? null);
    }
    node.appendChild(body);

    // Selecting a combination collapses the gallery onto it.
    node.addEventListener("click", () => {
      this.store.commit({ settings: cell.settings, fanOutSelections: {} }, "widgets");
      this.grid.textContent = "";
    });
    return node;
  }
}
