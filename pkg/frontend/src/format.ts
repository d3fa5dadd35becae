/** Display helpers. The comparison bar shows the service's number
 * verbatim; everything else may shorten for readability. */
import type { LabelMode, LayoutEdgeJson } from "./types.js";

/** Verbatim percent label: no client-side rounding beyond display. */
export function percentText(normalizedPercent: number): string {
  return `${normalizedPercent}%`;
}

/** CSS width for the colored bar, clamped to the scale. */
export function barWidth(normalizedPercent: number): string {
  const clamped = Math.max(0, Math.min(100, normalizedPercent));
  return `${clamped}%`;
}

export function attitudeGlyph(attitude: string | undefined): string {
  switch (attitude) {
    case "good-news":
      return "☺";
    case "bad-news":
      return "☹";
    case "neutral":
      return "•";
    default:
      return "?";
  }
}

export function priorityLabel(priority: string | undefined): string {
  switch (priority) {
    case "must-see":
      return "MUST SEE";
    case "interesting":
      return "INTERESTING";
    case "facultative":
      return "FACULTATIVE";
    default:
      return "?";
  }
}

/** Edge label for the selected mode; all three values are always present
 * in the payload, the mode only picks which one to show. */
export function edgeLabel(edge: LayoutEdgeJson, mode: LabelMode): string {
  const value = mode === "computed" ? edge.computed : mode === "layout" ? edge.layout : edge.ratio;
  if (value === null) {
    return "n/a";
  }
  return shortNumber(value);
}

export function shortNumber(value: number): string {
  if (!Number.isFinite(value)) {
    return String(value);
  }
  return String(Number(value.toPrecision(4)));
}
