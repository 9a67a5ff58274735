import { beforeEach, describe, expect, it } from "vitest";

import type { JsonValue } from "../src/api.js";
import { registerRenderer, renderSpec } from "../src/render.js";

let container: HTMLElement;

beforeEach(() => {
  container = document.createElement("div");
  document.body.appendChild(container);
});

const TABLE_SPEC: JsonValue = {
  title: "ages",
  columns: ["age", "people"],
  limit: 2,
  rows: [
    { age: 0, people: 100 },
    { age: 5, people: 90 },
    { age: 10, people: 80 },
  ],
};

describe("renderSpec", () => {
  it("renders table specs with title, header, and row limit", async () => {
    await renderSpec(container, "table", TABLE_SPEC);
    expect(container.querySelector(".table-title")?.textContent).toBe("ages");
    const headers = [...container.querySelectorAll("th")].map((th) => th.textContent);
    expect(headers).toEqual(["age", "people"]);
    // limit 2 wins over the 3 rows present
    expect(container.querySelectorAll("tbody tr")).toHaveLength(2);
    const firstRow = [...container.querySelectorAll("tbody tr")][0];
    expect([...firstRow.querySelectorAll("td")].map((td) => td.textContent)).toEqual([
      "0",
      "100",
    ]);
  });

  it("takes rows from the data argument when the spec has none", async () => {
    await renderSpec(container, "table", { columns: ["a"] }, [{ a: 1 }, { a: 2 }]);
    expect(container.querySelectorAll("tbody tr")).toHaveLength(2);
  });

  it("derives columns from the first row when unspecified", async () => {
    await renderSpec(container, "table", { rows: [{ x: 1, y: 2 }] });
    const headers = [...container.querySelectorAll("th")].map((th) => th.textContent);
    expect(headers).toEqual(["x", "y"]);
  });

  it("delegates registered languages to their renderer", async () => {
    const seen: JsonValue[] = [];
    registerRenderer("vega-lite", (node, spec) => {
      seen.push(spec);
      node.textContent = "embedded";
    });
    await renderSpec(container, "vega-lite", { mark: "bar" });
    expect(seen).toEqual([{ mark: "bar" }]);
    expect(container.textContent).toBe("embedded");
  });

  it("falls back to formatted JSON for unknown languages", async () => {
    await renderSpec(container, "mystery", { k: 1 });
    const pre = container.querySelector("pre.spec-fallback");
    expect(pre).not.toBeNull();
    expect(JSON.parse(pre?.textContent ?? "")).toEqual({ k: 1 });
  });
});
