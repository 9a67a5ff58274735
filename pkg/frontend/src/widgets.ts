/** Widget pane: one control per visible parameter.
 *
 * DataTarget and MultiDataTarget render as shelves taking drag-and-drop
 * column pills color-coded by role; Boolean renders a switch, Enum a
 * dropdown, Number a slider with a numeric input, String a text input.
 * Text and Section are display-only. Which parameters are visible is the
 * service's call (POST /visible-params), not computed here.
 */

import type { ColumnInfo, JsonValue, ParamDoc, TemplateDoc } from "./api.js";

export interface WidgetHandlers {
  onSet(name: string, value: JsonValue): void;
  onClear?(name: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function rolePill(column: ColumnInfo): HTMLElement {
  const pill = el("span", `pill role-${column.role.toLowerCase()}`, column.name);
  pill.draggable = true;
  pill.dataset.column = column.name;
  pill.dataset.role = column.role;
  pill.addEventListener("dragstart", (event) => {
    event.dataTransfer?.setData("text/ivy-column", column.name);
  });
  return pill;
}

function currentValue(param: ParamDoc, settings: Record<string, JsonValue>): JsonValue {
  if (param.name in settings) return settings[param.name];
  return param.defaultValue ?? null;
}

function shelf(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  columns: ColumnInfo[],
  handlers: WidgetHandlers,
): HTMLElement {
  const multi = param.type === "MultiDataTarget";
  const zone = el("div", "shelf");
  const value = currentValue(param, settings);
  const names: string[] = multi
    ? Array.isArray(value)
      ? (value as string[])
      : []
    : typeof value === "string"
      ? [value]
      : [];
  const byName = new Map(columns.map((c) => [c.name, c]));
  for (const name of names) {
    const column = byName.get(name) ?? { name, role: "Dimension" as const };
    const pill = rolePill(column);
    pill.classList.add("placed");
    pill.addEventListener("dblclick", () => {
      if (multi) {
        handlers.onSet(
          param.name,
          names.filter((n) => n !== name),
        );
      } else {
        handlers.onClear?.(param.name);
      }
    });
    zone.appendChild(pill);
  }
  const drop = el("div", "drop-target", names.length === 0 ? "drop a column" : "");
  drop.addEventListener("dragover", (event) => event.preventDefault());
  drop.addEventListener("drop", (event) => {
    event.preventDefault();
    const name = event.dataTransfer?.getData("text/ivy-column");
    if (!name) return;
    handlers.onSet(param.name, multi ? [...names, name] : name);
  });
  zone.appendChild(drop);
  return zone;
}

function switchWidget(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  handlers: WidgetHandlers,
): HTMLElement {
  const input = el("input", "switch");
  input.type = "checkbox";
  input.checked = currentValue(param, settings) === true;
  input.addEventListener("change", () => handlers.onSet(param.name, input.checked));
  return input;
}

function dropdown(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  handlers: WidgetHandlers,
): HTMLElement {
  const select = el("select", "dropdown");
  for (const allowed of param.config?.allowedValues ?? []) {
    const option = el("option", undefined, allowed);
    option.value = allowed;
    select.appendChild(option);
  }
  const value = currentValue(param, settings);
  if (typeof value === "string") select.value = value;
  select.addEventListener("change", () => handlers.onSet(param.name, select.value));
  return select;
}

function numberWidget(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  handlers: WidgetHandlers,
): HTMLElement {
  const wrap = el("div", "number-widget");
  const slider = el("input", "slider");
  slider.type = "range";
  const box = el("input", "number-entry");
  box.type = "number";
  const config = param.config ?? {};
  for (const input of [slider, box]) {
    if (config.min !== undefined) input.min = String(config.min);
    if (config.max !== undefined) input.max = String(config.max);
    if (config.step !== undefined) input.step = String(config.step);
  }
  const value = currentValue(param, settings);
  const text = typeof value === "number" ? String(value) : "";
  slider.value = text;
  box.value = text;
  const push = (raw: string) => {
    const parsed = Number(raw);
    if (!Number.isNaN(parsed)) handlers.onSet(param.name, parsed);
  };
  slider.addEventListener("input", () => {
    box.value = slider.value;
    push(slider.value);
  });
  box.addEventListener("change", () => {
    slider.value = box.value;
    push(box.value);
  });
  wrap.append(slider, box);
  return wrap;
}

function textWidget(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  handlers: WidgetHandlers,
): HTMLElement {
  const input = el("input", "text-entry");
  input.type = "text";
  const value = currentValue(param, settings);
  input.value = typeof value === "string" ? value : "";
  input.addEventListener("change", () => handlers.onSet(param.name, input.value));
  return input;
}

function control(
  param: ParamDoc,
  settings: Record<string, JsonValue>,
  columns: ColumnInfo[],
  handlers: WidgetHandlers,
): HTMLElement | null {
  switch (param.type) {
    case "DataTarget":
    case "MultiDataTarget":
      return shelf(param, settings, columns, handlers);
    case "Boolean":
      return switchWidget(param, settings, handlers);
    case "Enum":
      return dropdown(param, settings, handlers);
    case "Number":
      return numberWidget(param, settings, handlers);
    case "String":
      return textWidget(param, settings, handlers);
    case "Section":
    case "Text":
      return null;
  }
}

/** Rebuild the widget column. `visible` comes from the service and already
 * reflects every displayPredicate. */
export function renderWidgets(
  container: HTMLElement,
  template: TemplateDoc,
  settings: Record<string, JsonValue>,
  visible: string[],
  columns: ColumnInfo[],
  handlers: WidgetHandlers,
): void {
  container.textContent = "";
  const show = new Set(visible);
  for (const param of template.params) {
    if (!show.has(param.name)) continue;
    const row = el("div", "widget-row");
    row.dataset.param = param.name;
    if (param.type === "Section") {
      row.classList.add("section-row");
      row.appendChild(el("h3", "section-label", param.config?.label ?? param.name));
    } else if (param.type === "Text") {
      row.appendChild(el("p", "static-text", param.config?.text ?? ""));
    } else {
      row.appendChild(el("label", "widget-label", param.name));
      const widget = control(param, settings, columns, handlers);
      if (widget) row.appendChild(widget);
      row.appendChild(el("span", "widget-error"));
    }
    container.appendChild(row);
  }
}

/** Inline service errors land on the widget they name. */
export function showWidgetErrors(container: HTMLElement, errors: Record<string, string>): void {
  for (const row of container.querySelectorAll<HTMLElement>(".widget-row")) {
    const slot = row.querySelector<HTMLElement>(".widget-error");
    if (!slot) continue;
    const message = errors[row.dataset.param ?? ""];
    slot.textContent = message ?? "";
    row.classList.toggle("has-error", message !== undefined);
  }
}
