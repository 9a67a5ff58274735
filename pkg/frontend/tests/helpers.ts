/** In-memory stand-in for the registry service.
 *
 * Implements the slice of the HTTP contract these tests exercise, with the
 * same envelopes and the same semantics the real service's own test suite
 * pins down: defaults overlay, bracket substitution, $cond on the limited
 * predicate forms the fixtures use, declaration-order fan-out products,
 * optimistic publish versions. It exists so the UI tests stay hermetic;
 * the live suite (live.test.ts) runs the same flows against the real
 * process when IVY_SERVICE_URL is set.
 */

import type {
  ColumnInfo,
  FanOutCellDoc,
  JsonValue,
  ParamDoc,
  SettingsDoc,
  SuggestionDoc,
  TemplateDoc,
  Transport,
} from "../src/api.js";

type Dict = Record<string, JsonValue>;

function isDict(value: JsonValue | undefined): value is Dict {
  return value !== null && typeof value === "object" && !Array.isArray(value);
}

/** `name == literal` / `name != literal` / bare true|false. */
function evalPredicate(source: string, lookup: (name: string) => JsonValue): boolean {
  const trimmed = source.trim();
  if (trimmed === "true") return true;
  if (trimmed === "false") return false;
  const match = /^([A-Za-z_][A-Za-z0-9_]*)\s*(==|!=)\s*(.+)$/.exec(trimmed);
  if (!match) throw new Error(`fake registry cannot evaluate: ${source}`);
  const [, name, op, rawLiteral] = match;
  let literal: JsonValue;
  const quoted = /^'(.*)'$|^"(.*)"$/.exec(rawLiteral.trim());
  if (quoted) literal = quoted[1] ?? quoted[2];
  else if (rawLiteral === "true") literal = true;
  else if (rawLiteral === "false") literal = false;
  else if (rawLiteral === "null") literal = null;
  else literal = Number(rawLiteral);
  const equal = lookup(name) === literal;
  return op === "==" ? equal : !equal;
}

function atomicText(value: JsonValue): string {
  if (value === null) return "";
  if (value === true) return "true";
  if (value === false) return "false";
  if (Array.isArray(value)) return value.map(atomicText).join(",");
  return String(value);
}

const DELETED = Symbol("deleted");

function evaluateBody(
  node: JsonValue,
  lookup: (name: string) => JsonValue,
): JsonValue | typeof DELETED {
  if (typeof node === "string") {
    const whole = /^\[([A-Za-z_][A-Za-z0-9_]*)\]$/.exec(node);
    if (whole) return lookup(whole[1]);
    return node.replace(/\[([A-Za-z_][A-Za-z0-9_]*)\]/g, (_, name) =>
      atomicText(lookup(name)),
    );
  }
  if (Array.isArray(node)) {
    const out: JsonValue[] = [];
    for (const item of node) {
      const value = evaluateBody(item, lookup);
      if (value !== DELETED) out.push(value);
    }
    return out;
  }
  if (isDict(node)) {
    if ("$cond" in node) {
      const cond = node.$cond as Dict;
      const branch = evalPredicate(cond.query as string, lookup) ? "true" : "false";
      if (!(branch in cond)) return DELETED;
      return evaluateBody(cond[branch], lookup);
    }
    const out: Dict = {};
    for (const [key, item] of Object.entries(node)) {
      const value = evaluateBody(item, lookup);
      if (value !== DELETED) out[key] = value;
    }
    return out;
  }
  return node;
}

interface Violation {
  parameter: string;
  reason: string;
}

function checkSettings(template: TemplateDoc, settings: SettingsDoc): Violation[] {
  const declared = new Map(template.params.map((p) => [p.name, p]));
  const violations: Violation[] = [];
  for (const [name, value] of Object.entries(settings)) {
    if (name === "$filters") continue;
    const param = declared.get(name);
    if (!param) {
      violations.push({ parameter: name, reason: "no such parameter" });
      continue;
    }
    if (param.type === "Number" && typeof value === "number") {
      const { min, max } = param.config ?? {};
      if ((min !== undefined && value < min) || (max !== undefined && value > max)) {
        violations.push({ parameter: name, reason: "out of range" });
      }
    }
    if (param.type === "Enum" && typeof value === "string") {
      if (!(param.config?.allowedValues ?? []).includes(value)) {
        violations.push({ parameter: name, reason: "not an allowed value" });
      }
    }
  }
  return violations;
}

function effective(template: TemplateDoc, settings: SettingsDoc): SettingsDoc {
  const merged: SettingsDoc = {};
  for (const param of template.params) {
    if (param.defaultValue !== undefined) merged[param.name] = param.defaultValue;
  }
  for (const [name, value] of Object.entries(settings)) {
    if (name !== "$filters") merged[name] = value;
  }
  return merged;
}

export class FakeRegistry {
  private templates = new Map<string, TemplateDoc[]>();
  readonly requests: { method: string; path: string; body?: JsonValue }[] = [];

  constructor(readonly columns: ColumnInfo[] = []) {}

  publishDoc(doc: TemplateDoc): void {
    const versions = this.templates.get(doc.name) ?? [];
    versions.push({ ...doc, version: versions.length + 1 });
    this.templates.set(doc.name, versions);
  }

  latest(name: string): TemplateDoc | undefined {
    const versions = this.templates.get(name);
    return versions?.[versions.length - 1];
  }

  /** fetch-compatible entry point for RegistryClient. */
  transport: Transport = async (url, init) => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    let body: JsonValue | undefined;
    if (typeof init?.body === "string") body = JSON.parse(init.body) as JsonValue;
    this.requests.push({ method, path, body });
    try {
      return this.route(method, path, body, init);
    } catch (err) {
      return jsonResponse(
        { error: { error: "Internal", message: (err as Error).message } },
        500,
      );
    }
  };

  private route(
    method: string,
    path: string,
    body: JsonValue | undefined,
    init?: RequestInit,
  ): Response {
    if (method === "GET" && path === "/health") return jsonResponse({ status: "ok" });

    if (method === "GET" && path.startsWith("/templates")) {
      const named = /^\/templates\/([^/?]+)$/.exec(path);
      if (named) {
        const doc = this.latest(decodeURIComponent(named[1]));
        if (!doc) return errorResponse(404, "UnknownTemplate", `no template ${named[1]}`);
        return jsonResponse(doc as unknown as JsonValue);
      }
      const summaries = [...this.templates.keys()].sort().map((name) => {
        const doc = this.latest(name) as TemplateDoc;
        return {
          name: doc.name,
          version: doc.version ?? 1,
          description: doc.description,
          language: doc.language,
          owner: "anonymous",
          createdAt: "2026-01-01T00:00:00+00:00",
        };
      });
      return jsonResponse({ templates: summaries } as unknown as JsonValue);
    }

    if (method === "POST" && path === "/templates") {
      const doc = body as unknown as TemplateDoc;
      const versions = this.templates.get(doc.name) ?? [];
      const headers = new Headers(init?.headers);
      const ifMatch = headers.get("If-Match");
      if (ifMatch !== null && Number(ifMatch) !== versions.length && versions.length > 0) {
        return errorResponse(
          409,
          "VersionConflict",
          `expected version ${ifMatch}, latest is ${versions.length}`,
        );
      }
      this.publishDoc(doc);
      const stored = this.latest(doc.name) as TemplateDoc;
      return jsonResponse(
        {
          name: stored.name,
          version: stored.version,
          description: stored.description,
          language: stored.language,
          owner: "anonymous",
          createdAt: "2026-01-01T00:00:00+00:00",
        } as unknown as JsonValue,
        201,
      );
    }

    if (method === "POST" && path === "/apply") {
      const request = body as Dict;
      const template = this.resolve(request.template);
      if (!template) return errorResponse(404, "UnknownTemplate", "no such template");
      return this.applyResponse(template, (request.settings ?? {}) as SettingsDoc);
    }

    if (method === "POST" && path === "/visible-params") {
      const request = body as Dict;
      const template = this.resolve(request.template);
      if (!template) return errorResponse(404, "UnknownTemplate", "no such template");
      const values = effective(template, (request.settings ?? {}) as SettingsDoc);
      const visible = template.params
        .filter(
          (p) =>
            p.displayPredicate === undefined ||
            evalPredicate(p.displayPredicate, (name) => values[name] ?? null),
        )
        .map((p) => p.name);
      return jsonResponse({ visible } as unknown as JsonValue);
    }

    if (method === "POST" && path === "/fanout") {
      const request = body as Dict;
      const template = this.resolve(request.template);
      if (!template) return errorResponse(404, "UnknownTemplate", "no such template");
      const base = (request.settings ?? {}) as SettingsDoc;
      const optionSets = (request.optionSets ?? {}) as Record<string, JsonValue[]>;
      if (Object.keys(optionSets).length === 0) {
        return errorResponse(422, "SettingsViolation", "optionSets must not be empty");
      }
      // Cartesian product in parameter declaration order.
      const sweep = template.params
        .map((p) => p.name)
        .filter((name) => name in optionSets);
      let combos: SettingsDoc[] = [{}];
      for (const name of sweep) {
        const next: SettingsDoc[] = [];
        for (const combo of combos) {
          for (const value of optionSets[name]) next.push({ ...combo, [name]: value });
        }
        combos = next;
      }
      const cells: FanOutCellDoc[] = combos.map((combo) => {
        const settings = { ...base, ...combo };
        const violations = checkSettings(template, settings);
        if (violations.length > 0) {
          return {
            settings,
            error: { error: "SettingsViolation", message: "invalid settings" },
          };
        }
        const lookup = makeLookup(template, settings);
        return { settings, spec: evaluateBody(template.body, lookup) as JsonValue };
      });
      return jsonResponse({ cells } as unknown as JsonValue);
    }

    if (method === "POST" && path === "/suggest") {
      const request = body as Dict;
      const columns = (request.columns ?? []) as unknown as ColumnInfo[];
      const suggestions = suggestFields(request.body as JsonValue, columns);
      return jsonResponse({ suggestions } as unknown as JsonValue);
    }

    if (method === "POST" && path === "/datasets") {
      return jsonResponse(
        {
          id: "dfakefakefake",
          rowCount: 4,
          columns: this.columns,
        } as unknown as JsonValue,
        201,
      );
    }

    return errorResponse(404, "UnknownRoute", `${method} ${path}`);
  }

  private resolve(ref: JsonValue | undefined): TemplateDoc | undefined {
    if (typeof ref === "string") return this.latest(ref);
    if (isDict(ref)) return ref as unknown as TemplateDoc;
    return undefined;
  }

  private applyResponse(template: TemplateDoc, settings: SettingsDoc): Response {
    const violations = checkSettings(template, settings);
    if (violations.length > 0) {
      return jsonResponse(
        {
          error: {
            error: "SettingsViolation",
            message: "settings do not fit the template",
            detail: { violations },
          },
        } as unknown as JsonValue,
        422,
      );
    }
    const spec = evaluateBody(template.body, makeLookup(template, settings));
    if (spec === DELETED) {
      return errorResponse(422, "TopLevelBottom", "the whole document was deleted");
    }
    return jsonResponse(spec);
  }
}

function makeLookup(
  template: TemplateDoc,
  settings: SettingsDoc,
): (name: string) => JsonValue {
  const values = effective(template, settings);
  const symbols = new Set((template.symbols ?? []).map((s) => s.name));
  return (name) => {
    const value = values[name];
    if (value !== undefined && value !== null) return value;
    if (symbols.has(name)) return name;
    return null;
  };
}

function suggestFields(body: JsonValue, columns: ColumnInfo[]): SuggestionDoc[] {
  const byName = new Map(columns.map((c) => [c.name, c]));
  const out: SuggestionDoc[] = [];
  const walk = (node: JsonValue, pointer: string): void => {
    if (Array.isArray(node)) {
      node.forEach((item, i) => walk(item, `${pointer}/${i}`));
      return;
    }
    if (!isDict(node)) return;
    for (const [key, value] of Object.entries(node)) {
      const path = `${pointer}/${key}`;
      if (key === "field" && typeof value === "string" && byName.has(value)) {
        const column = byName.get(value) as ColumnInfo;
        const name = out.length === 0 ? "field" : `field${out.length + 1}`;
        const param: ParamDoc = {
          name,
          type: "DataTarget",
          config: { allowedRoles: [column.role], required: true },
          defaultValue: value,
        };
        out.push({
          id: `data-field:${path}`,
          description: `abstract data field "${value}"`,
          path,
          kind: "AbstractDataField",
          param,
          replacement: `[${name}]`,
          original: value,
        });
      } else {
        walk(value, path);
      }
    }
  };
  walk(body, "");
  return out;
}

function jsonResponse(body: JsonValue, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function errorResponse(status: number, code: string, message: string): Response {
  return jsonResponse({ error: { error: code, message } } as unknown as JsonValue, status);
}

// --- fixtures shared across the suites --------------------------------------

export const POPULATION_COLUMNS: ColumnInfo[] = [
  { name: "year", role: "Measure" },
  { name: "age", role: "Measure" },
  { name: "people", role: "Measure" },
  { name: "sex", role: "Dimension" },
];

/** Bar template with a hidden sort-direction parameter, mirroring the
 * engine's bundled fixture shape. */
export function sortableBar(): TemplateDoc {
  return {
    name: "sortable-bar",
    description: "Bar chart with optional sorting",
    language: "vega-lite",
    params: [
      {
        name: "xDim",
        type: "DataTarget",
        config: { allowedRoles: ["Dimension", "Measure"], required: true },
      },
      {
        name: "yDim",
        type: "DataTarget",
        config: { allowedRoles: ["Measure"], required: true },
      },
      {
        name: "year",
        type: "Number",
        config: { min: 1850, max: 2000, step: 10 },
        defaultValue: 2000,
      },
      { name: "sort", type: "Boolean", defaultValue: false },
      {
        name: "sortDirection",
        type: "Enum",
        config: { allowedValues: ["ascending", "descending"] },
        defaultValue: "ascending",
        displayPredicate: "sort == true",
      },
      { name: "color", type: "String", defaultValue: "#4C78A8" },
    ],
    symbols: [],
    body: {
      mark: "bar",
      transform: [{ filter: "datum.year == [year]" }],
      encoding: {
        x: { field: "[xDim]", type: "ordinal" },
        y: {
          field: "[yDim]",
          type: "quantitative",
          sort: { $cond: { query: "sort == true", true: "[sortDirection]" } },
        },
        color: { value: "[color]" },
      },
    },
  };
}

export function settle(turns = 12): Promise<void> {
  let chain = Promise.resolve();
  for (let i = 0; i < turns; i++) {
    chain = chain.then(() => new Promise<void>((resolve) => setTimeout(resolve)));
  }
  return chain;
}
