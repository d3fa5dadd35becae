/** Viewpoint card view-model: thumbnail, metadata icons, full tooltip. */
import { attitudeGlyph, priorityLabel } from "./format.js";
import type { StepMetaJson, ViewpointSummary } from "./types.js";

export interface CardModel {
  id: string;
  broken: boolean;
  title: string;
  thumbnail: string | null; // null -> placeholder box
  areaIcon: string | null;
  attitude: string;
  priority: string;
  tooltip: string[];
}

export function cardFromSummary(summary: ViewpointSummary): CardModel {
  if (summary.broken) {
    return {
      id: summary.id,
      broken: true,
      title: summary.id,
      thumbnail: null,
      areaIcon: null,
      attitude: "?",
      priority: "?",
      tooltip: ["broken reference"],
    };
  }
  return {
    id: summary.id,
    broken: false,
    title: summary.name ?? summary.id,
    thumbnail: summary.image ?? null,
    areaIcon: summary.areaIcon ?? null,
    attitude: attitudeGlyph(summary.attitude),
    priority: priorityLabel(summary.priority),
    tooltip: tooltipLines(summary),
  };
}

export function cardFromStepMeta(viewpointId: string, broken: boolean, meta?: StepMetaJson): CardModel {
  if (broken || !meta) {
    return {
      id: viewpointId,
      broken: true,
      title: viewpointId,
      thumbnail: null,
      areaIcon: null,
      attitude: "?",
      priority: "?",
      tooltip: ["broken reference"],
    };
  }
  return cardFromSummary({
    id: viewpointId,
    broken: false,
    name: meta.name,
    image: meta.image,
    areaId: meta.areaId,
    areaIcon: meta.areaIcon,
    attitude: meta.attitude,
    priority: meta.priority,
    owner: meta.owner,
    savedAt: meta.savedAt,
    description: meta.description,
  });
}

/** Every metadata field, one line each (the hover tooltip). */
export function tooltipLines(summary: ViewpointSummary): string[] {
  const lines = [
    `name: ${summary.name ?? ""}`,
    `owner: ${summary.owner ?? ""}`,
    `priority: ${summary.priority ?? ""}`,
    `attitude: ${summary.attitude ?? ""}`,
    `saved at: ${summary.savedAt ?? ""}`,
  ];
  if (summary.areaId) {
    lines.push(`area: ${summary.areaId}`);
  }
  if (summary.periodStart && summary.periodEnd) {
    lines.push(`period: ${summary.periodStart} .. ${summary.periodEnd}`);
  }
  if (summary.description) {
    lines.push(`description: ${summary.description}`);
  }
  if (summary.image) {
    lines.push(`image: ${summary.image}`);
  }
  return lines;
}

/** DOM rendering of a card; placeholder when the image is missing. */
export function renderCard(model: CardModel): HTMLElement {
  const card = document.createElement("div");
  card.className = model.broken ? "vp-card broken" : "vp-card";
  card.dataset.id = model.id;
  card.title = model.tooltip.join("\n");

  const thumb = document.createElement("div");
  thumb.className = "vp-thumb";
  if (model.thumbnail) {
    const img = document.createElement("img");
    img.src = model.thumbnail;
    img.alt = model.title;
    img.onerror = () => {
      img.remove();
      thumb.classList.add("placeholder");
    };
    thumb.appendChild(img);
  } else {
    thumb.classList.add("placeholder");
    thumb.textContent = model.broken ? "✕" : model.title.slice(0, 2).toUpperCase();
  }
  card.appendChild(thumb);

  const icons = document.createElement("div");
  icons.className = "vp-icons";
  if (model.areaIcon) {
    const area = document.createElement("span");
    area.className = "area-icon";
    area.textContent = "⚑";
    area.title = model.areaIcon;
    icons.appendChild(area);
  }
  const attitude = document.createElement("span");
  attitude.className = "attitude-icon";
  attitude.textContent = model.attitude;
  icons.appendChild(attitude);
  const priority = document.createElement("span");
  priority.className = "priority-badge";
  priority.textContent = model.priority;
  icons.appendChild(priority);
  card.appendChild(icons);

  const label = document.createElement("div");
  label.className = "vp-title";
  label.textContent = model.title;
  card.appendChild(label);
  return card;
}
