/** Chart chooser: a card grid over the catalog listing, filterable by the
 * data roles in play, plus the related-templates popover for the current
 * selection. Ranking comes from the service (listTemplates with roles).
 */

import type { TemplateSummary } from "./api.js";

export interface GalleryHandlers {
  onPick(name: string): void;
}

function card(summary: TemplateSummary, handlers: GalleryHandlers): HTMLElement {
  const node = document.createElement("div");
  node.className = "gallery-card";
  node.dataset.template = summary.name;

  const title = document.createElement("h4");
  title.textContent = summary.name;
  node.appendChild(title);

  if (summary.match) {
    const badge = document.createElement("span");
    badge.className = `match-badge match-${summary.match.kind.toLowerCase()}`;
    badge.textContent = summary.match.kind;
    node.appendChild(badge);
  }

  const blurb = document.createElement("p");
  blurb.textContent = summary.description;
  node.appendChild(blurb);

  node.addEventListener("click", () => handlers.onPick(summary.name));
  return node;
}

export function renderGallery(
  container: HTMLElement,
  summaries: TemplateSummary[],
  handlers: GalleryHandlers,
): void {
  container.textContent = "";
  container.classList.add("gallery-grid");
  if (summaries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "gallery-empty";
    empty.textContent = "no matching templates";
    container.appendChild(empty);
    return;
  }
  for (const summary of summaries) container.appendChild(card(summary, handlers));
}

/** Popover listing other templates ranked against the current data roles;
 * the current template itself is omitted. */
export function renderRelatedPopover(
  container: HTMLElement,
  current: string,
  ranked: TemplateSummary[],
  handlers: GalleryHandlers,
): void {
  container.textContent = "";
  container.classList.add("related-popover");
  const heading = document.createElement("h5");
  heading.textContent = "related templates";
  container.appendChild(heading);
  const list = document.createElement("ul");
  for (const summary of ranked) {
    if (summary.name === current) continue;
    const item = document.createElement("li");
    item.dataset.template = summary.name;
    item.textContent = summary.match
      ? `${summary.name} (${summary.match.kind})`
      : summary.name;
    item.addEventListener("click", () => handlers.onPick(summary.name));
    list.appendChild(item);
  }
  container.appendChild(list);
}
