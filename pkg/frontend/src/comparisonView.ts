/** Pairwise comparison: colored 0-100% bar, top-3 differing categories,
 * expandable per-preference delta table. All numbers come from the
 * service verbatim. */
import { ApiError, type TraceviewApi } from "./api.js";
import { barWidth, percentText, shortNumber } from "./format.js";
import type { DiffJson } from "./types.js";

export class ComparisonView {
  constructor(
    private api: TraceviewApi,
    private root: HTMLElement,
  ) {}

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <div class="toolbar">
        <select id="cmp-left"></select>
        <span>vs</span>
        <select id="cmp-right"></select>
        <button id="cmp-run" class="primary">Compare</button>
      </div>
      <div id="cmp-result"></div>
    `;
    const summaries = await this.api.listViewpoints();
    for (const side of ["#cmp-left", "#cmp-right"]) {
      const select = this.root.querySelector(side) as HTMLSelectElement;
      for (const s of summaries) {
        if (s.broken) {
          continue;
        }
        const option = document.createElement("option");
        option.value = s.id;
        option.textContent = s.name ?? s.id;
        select.appendChild(option);
      }
    }
    this.root.querySelector("#cmp-run")!.addEventListener("click", () => void this.compare());
  }

  private async compare(): Promise<void> {
    const left = (this.root.querySelector("#cmp-left") as HTMLSelectElement).value;
    const right = (this.root.querySelector("#cmp-right") as HTMLSelectElement).value;
    const result = this.root.querySelector("#cmp-result") as HTMLElement;
    try {
      const report = await this.api.diff(left, right);
      result.innerHTML = "";
      result.appendChild(this.renderReport(report));
    } catch (err) {
      if (err instanceof ApiError) {
        result.innerHTML = `<div class="banner">error ${err.status}: ${err.message}</div>`;
        return;
      }
      throw err;
    }
  }

  renderReport(report: DiffJson): HTMLElement {
    const box = document.createElement("div");
    const bar = document.createElement("div");
    bar.className = "distance-bar";
    const fill = document.createElement("div");
    fill.className = "distance-fill";
    fill.style.width = barWidth(report.normalizedPercent);
    bar.appendChild(fill);
    const label = document.createElement("span");
    label.className = "distance-label";
    label.textContent = percentText(report.normalizedPercent);
    bar.appendChild(label);
    box.appendChild(bar);

    const raw = document.createElement("div");
    raw.className = "dim";
    raw.textContent = `raw ${report.rawDistance} of max ${report.maxDistance}`;
    box.appendChild(raw);

    if (!report.categories.length) {
      const none = document.createElement("p");
      none.textContent = "no differences";
      box.appendChild(none);
      return box;
    }

    const heading = document.createElement("h3");
    heading.textContent = "Top differing categories";
    box.appendChild(heading);
    const list = document.createElement("ol");
    for (const category of report.categories.slice(0, 3)) {
      const item = document.createElement("li");
      item.textContent = `${category.name} — ${category.distance}`;
      list.appendChild(item);
    }
    box.appendChild(list);

    for (const category of report.categories) {
      const details = document.createElement("details");
      const summary = document.createElement("summary");
      summary.textContent = `${category.name} (${category.distance}) — ${category.deltas.length} preferences`;
      details.appendChild(summary);
      const table = document.createElement("table");
      table.innerHTML =
        "<tr><th>preference</th><th>scope</th><th>instance</th><th>weight</th><th>left</th><th>right</th></tr>";
      for (const delta of category.deltas) {
        const row = document.createElement("tr");
        const cells = [
          delta.prefId,
          delta.scope,
          delta.instance,
          shortNumber(delta.weight),
          delta.left === null ? "(absent)" : delta.left,
          delta.right === null ? "(absent)" : delta.right,
        ];
        for (const text of cells) {
          const cell = document.createElement("td");
          cell.textContent = text;
          row.appendChild(cell);
        }
        table.appendChild(row);
      }
      details.appendChild(table);
      box.appendChild(details);
    }
    return box;
  }
}
