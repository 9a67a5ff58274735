/** Typed client for the template registry HTTP API.
 *
 * Every operation that involves template semantics (apply, visibility,
 * fan-out, suggestions, translation) goes through this client; the editor
 * never evaluates a template locally.
 */

export type JsonValue =
  | null
  | boolean
  | number
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

export type DataRole = "Measure" | "Dimension" | "Time";

export interface ColumnInfo {
  name: string;
  role: DataRole;
}

export interface ParamConfig {
  allowedRoles?: DataRole[];
  required?: boolean;
  min?: number;
  max?: number;
  step?: number;
  allowedValues?: string[];
  minCount?: number;
  maxCount?: number;
  text?: string;
  label?: string;
}

export interface ParamDoc {
  name: string;
  type:
    | "DataTarget"
    | "MultiDataTarget"
    | "String"
    | "Number"
    | "Boolean"
    | "Enum"
    | "Text"
    | "Section";
  config?: ParamConfig;
  defaultValue?: JsonValue;
  displayPredicate?: string;
}

export interface SymbolDoc {
  name: string;
  description?: string;
}

export interface TemplateDoc {
  name: string;
  description: string;
  language: string;
  params: ParamDoc[];
  symbols?: SymbolDoc[];
  body: JsonValue;
  version?: number;
}

/** Settings documents are flat; the reserved "$filters" key carries filters. */
export type SettingsDoc = Record<string, JsonValue>;

export interface MatchInfo {
  kind: "Complete" | "Partial" | "NoMatch";
  mapping: Record<string, string>;
}

export interface TemplateSummary {
  name: string;
  version: number;
  description: string;
  language: string;
  owner: string;
  createdAt: string;
  forkOf?: { name: string; version: number };
  match?: MatchInfo;
}

export interface FanOutCellDoc {
  settings: SettingsDoc;
  spec?: JsonValue;
  error?: ErrorDoc;
}

export interface SuggestionDoc {
  id: string;
  description: string;
  path: string;
  kind: "AbstractDataField" | "AbstractLiteral";
  param: ParamDoc;
  replacement: string;
  original: JsonValue;
}

export interface TranslationDoc {
  settings: SettingsDoc;
  flag: "Complete" | "Partial" | "NoMatch";
  dropped: string[];
}

export interface DatasetInfo {
  id: string;
  rowCount: number;
  columns: ColumnInfo[];
}

export interface ErrorDoc {
  error: string;
  message: string;
  detail?: JsonValue;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorDoc,
  ) {
    super(`${body.error}: ${body.message}`);
    this.name = "ServiceError";
  }

  /** Parameter names called out in a violation detail, if any. */
  violatedParams(): string[] {
    const detail = this.body.detail;
    if (detail === null || typeof detail !== "object" || Array.isArray(detail)) return [];
    const violations = (detail as { violations?: JsonValue }).violations;
    if (!Array.isArray(violations)) return [];
    const names: string[] = [];
    for (const v of violations) {
      if (v !== null && typeof v === "object" && !Array.isArray(v)) {
        const p = (v as { parameter?: JsonValue }).parameter;
        if (typeof p === "string") names.push(p);
      }
    }
    return names;
  }
}

export type Transport = (url: string, init?: RequestInit) => Promise<Response>;

interface RequestOptions {
  method?: string;
  body?: unknown;
  headers?: Record<string, string>;
  signal?: AbortSignal;
  raw?: boolean;
}

export class RegistryClient {
  constructor(
    readonly baseUrl: string,
    private readonly transport: Transport = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, options: RequestOptions = {}): Promise<unknown> {
    const init: RequestInit = {
      method: options.method ?? "GET",
      headers: { ...(options.headers ?? {}) },
      signal: options.signal,
    };
    if (options.body !== undefined) {
      if (options.raw) {
        init.body = options.body as BodyInit;
      } else {
        init.body = JSON.stringify(options.body);
        (init.headers as Record<string, string>)["Content-Type"] = "application/json";
      }
    }
    const response = await this.transport(this.baseUrl + path, init);
    const text = await response.text();
    const parsed = text.length > 0 ? (JSON.parse(text) as JsonValue) : null;
    if (!response.ok) {
      const envelope =
        parsed !== null && typeof parsed === "object" && !Array.isArray(parsed)
          ? ((parsed as { error?: JsonValue }).error as ErrorDoc | undefined)
          : undefined;
      throw new ServiceError(
        response.status,
        envelope ?? { error: "Transport", message: text || response.statusText },
      );
    }
    return parsed;
  }

  async health(): Promise<boolean> {
    const body = (await this.request("/health")) as { status?: string };
    return body?.status === "ok";
  }

  /** With roles the listing comes back ranked by match quality. */
  async listTemplates(roles?: DataRole[]): Promise<TemplateSummary[]> {
    const query = roles && roles.length > 0 ? `?roles=${roles.join(",")}` : "";
    const body = (await this.request(`/templates${query}`)) as {
      templates: TemplateSummary[];
    };
    return body.templates;
  }

  async fetchTemplate(name: string): Promise<TemplateDoc> {
    return (await this.request(`/templates/${name}`)) as TemplateDoc;
  }

  async publish(doc: TemplateDoc, ifMatch?: number): Promise<TemplateSummary> {
    const headers: Record<string, string> = {};
    if (ifMatch !== undefined) headers["If-Match"] = String(ifMatch);
    return (await this.request("/templates", {
      method: "POST",
      body: doc,
      headers,
    })) as TemplateSummary;
  }

  async fork(source: string, newName: string): Promise<TemplateSummary> {
    return (await this.request(`/templates/${source}/fork`, {
      method: "POST",
      body: { name: newName },
    })) as TemplateSummary;
  }

  async apply(
    template: string | TemplateDoc,
    settings: SettingsDoc,
    options: { dataset?: string; signal?: AbortSignal } = {},
  ): Promise<JsonValue> {
    const payload: Record<string, unknown> = { template, settings };
    if (options.dataset) payload.dataset = options.dataset;
    return (await this.request("/apply", {
      method: "POST",
      body: payload,
      signal: options.signal,
    })) as JsonValue;
  }

  async visibleParams(
    template: string | TemplateDoc,
    settings: SettingsDoc,
  ): Promise<string[]> {
    const body = (await this.request("/visible-params", {
      method: "POST",
      body: { template, settings },
    })) as { visible: string[] };
    return body.visible;
  }

  async fanout(
    template: string | TemplateDoc,
    settings: SettingsDoc,
    optionSets: Record<string, JsonValue[]>,
    options: { dataset?: string; signal?: AbortSignal } = {},
  ): Promise<FanOutCellDoc[]> {
    const payload: Record<string, unknown> = { template, settings, optionSets };
    if (options.dataset) payload.dataset = options.dataset;
    const body = (await this.request("/fanout", {
      method: "POST",
      body: payload,
      signal: options.signal,
    })) as { cells: FanOutCellDoc[] };
    return body.cells;
  }

  async suggest(
    body: JsonValue,
    language: string,
    columns: ColumnInfo[],
  ): Promise<SuggestionDoc[]> {
    const response = (await this.request("/suggest", {
      method: "POST",
      body: { body, language, columns },
    })) as { suggestions: SuggestionDoc[] };
    return response.suggestions;
  }

  async translate(
    from: string | TemplateDoc,
    to: string | TemplateDoc,
    settings: SettingsDoc,
  ): Promise<TranslationDoc> {
    return (await this.request("/translate", {
      method: "POST",
      body: { from, to, settings },
    })) as TranslationDoc;
  }

  async uploadDataset(file: Blob, filename: string): Promise<DatasetInfo> {
    const form = new FormData();
    form.append("file", file, filename);
    return (await this.request("/datasets", {
      method: "POST",
      body: form,
      raw: true,
    })) as DatasetInfo;
  }
}
