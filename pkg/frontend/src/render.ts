/** Spec rendering.
 *
 * Vega and Vega-Lite render through whatever embedder the host page
 * registers (vega-embed in production); the "table" language has a
 * built-in HTML renderer. Without a delegate the spec is shown as
 * formatted JSON rather than failing.
 */

import type { JsonValue } from "./api.js";

export type SpecRenderer = (
  container: HTMLElement,
  spec: JsonValue,
  rows: JsonValue[] | null,
) => void | Promise<void>;

const delegates = new Map<string, SpecRenderer>();

export function registerRenderer(languageId: string, renderer: SpecRenderer): void {
  delegates.set(languageId, renderer);
}

interface TableSpec {
  title?: string;
  columns?: string[];
  limit?: number;
  rows?: Record<string, JsonValue>[];
}

function renderTable(container: HTMLElement, spec: JsonValue, rows: JsonValue[] | null): void {
  const doc = (spec ?? {}) as TableSpec;
  const data = (doc.rows ?? rows ?? []) as Record<string, JsonValue>[];
  const columns = doc.columns ?? (data.length > 0 ? Object.keys(data[0]) : []);
  const limit = typeof doc.limit === "number" ? doc.limit : data.length;

  container.textContent = "";
  if (doc.title) {
    const caption = document.createElement("h4");
    caption.className = "table-title";
    caption.textContent = doc.title;
    container.appendChild(caption);
  }
  const table = document.createElement("table");
  table.className = "data-table";
  const head = table.createTHead().insertRow();
  for (const column of columns) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of data.slice(0, limit)) {
    const tr = body.insertRow();
    for (const column of columns) {
      tr.insertCell().textContent = row[column] === undefined ? "" : String(row[column]);
    }
  }
  container.appendChild(table);
}

export async function renderSpec(
  container: HTMLElement,
  languageId: string,
  spec: JsonValue,
  rows: JsonValue[] | null = null,
): Promise<void> {
  if (languageId === "table") {
    renderTable(container, spec, rows);
    return;
  }
  const delegate = delegates.get(languageId);
  if (delegate) {
    await delegate(container, spec, rows);
    return;
  }
  container.textContent = "";
  const pre = document.createElement("pre");
  pre.className = "spec-fallback";
  pre.textContent = JSON.stringify(spec, null, 2);
  container.appendChild(pre);
}
