/** n-way comparison: 2D scatter of the MDS layout, togglable pairwise
 * links with computed/layout/ratio labels, the projection-quality panel,
 * and click-sequence path drawing that turns into a runnable scenario. */
import { type TraceviewApi } from "./api.js";
import { edgeLabel, shortNumber } from "./format.js";
import { PathDraw } from "./pathdraw.js";
import type { LabelMode, LayoutDocJson, StateSummaryJson } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 560;
const PAD = 50;

export interface ProjectionScale {
  x(v: number): number;
  y(v: number): number;
}

/** Fit layout coordinates into the SVG viewport (display only; the
 * geometry itself comes from the service). */
export function fitScale(doc: LayoutDocJson): ProjectionScale {
  const xs = doc.points.map((p) => p.x);
  const ys = doc.points.map((p) => p.y);
  const lo = Math.min(...xs, ...ys);
  const hi = Math.max(...xs, ...ys);
  const span = hi - lo || 1;
  const factor = (SIZE - 2 * PAD) / span;
  return {
    x: (v) => PAD + (v - lo) * factor,
    y: (v) => SIZE - PAD - (v - lo) * factor,
  };
}

export class ProjectionController {
  doc: LayoutDocJson | null = null;
  path = new PathDraw();
  lastRun: StateSummaryJson | null = null;

  constructor(private api: TraceviewApi) {}

  async project(ids: string[], label: LabelMode): Promise<void> {
    this.doc = await this.api.layout(ids, label);
    this.path.clear();
  }

  clickPoint(id: string): void {
    if (this.doc && this.doc.points.some((p) => p.id === id)) {
      this.path.append(id);
    }
  }

  /** Create a scenario from the drawn order, then walk it step by step
   * against the server session; returns the created scenario id. */
  async runDrawnScenario(name: string): Promise<string> {
    if (!this.path.canRun) {
      throw new Error("draw a path first");
    }
    const created = await this.api.createScenario(name, this.path.refs);
    for (let step = 1; step <= created.steps.length; step++) {
      this.lastRun = await this.api.goto(created.id, step);
    }
    return created.id;
  }
}

export class ProjectionView {
  controller: ProjectionController;
  private labelMode: LabelMode = "computed";
  private showLinks = true;

  constructor(
    private api: TraceviewApi,
    private root: HTMLElement,
  ) {
    this.controller = new ProjectionController(api);
  }

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <div class="toolbar">
        <div id="prj-picker" class="picker"></div>
        <button id="prj-run" class="primary">Project</button>
        <label><input type="checkbox" id="prj-links" checked/> links</label>
        <select id="prj-label">
          <option value="computed">computed distance</option>
          <option value="layout">layout distance</option>
          <option value="ratio">ratio</option>
        </select>
      </div>
      <div class="projection-wrap">
        <svg id="prj-svg" viewBox="0 0 ${SIZE} ${SIZE}"></svg>
        <div class="side-panel">
          <div id="prj-quality"></div>
          <h3>Drawn path</h3>
          <div id="prj-path" class="dim">click points to draw</div>
          <button id="prj-undo">Undo segment</button>
          <input id="prj-name" placeholder="scenario name" value="drawn path"/>
          <button id="prj-run-scn" class="primary">Run scenario</button>
          <div id="prj-state"></div>
        </div>
      </div>
    `;
    const picker = this.q("#prj-picker");
    const summaries = await this.api.listViewpoints();
    for (const s of summaries) {
      if (s.broken) {
        continue;
      }
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = s.id;
      label.appendChild(box);
      label.appendChild(document.createTextNode(s.name ?? s.id));
      picker.appendChild(label);
    }
    this.q("#prj-run").addEventListener("click", () => void this.project());
    this.q("#prj-links").addEventListener("change", (e) => {
      this.showLinks = (e.target as HTMLInputElement).checked;
      this.renderSvg();
    });
    this.q("#prj-label").addEventListener("change", (e) => {
      this.labelMode = (e.target as HTMLSelectElement).value as LabelMode;
      this.renderSvg();
    });
    this.q("#prj-undo").addEventListener("click", () => {
      this.controller.path.undo();
      this.renderSvg();
    });
    this.q("#prj-run-scn").addEventListener("click", () => void this.runScenario());
  }

  private q(selector: string): HTMLElement {
    return this.root.querySelector(selector) as HTMLElement;
  }

  private selectedIds(): string[] {
    return Array.from(this.q("#prj-picker").querySelectorAll("input:checked")).map(
      (el) => (el as HTMLInputElement).value,
    );
  }

  private async project(): Promise<void> {
    const ids = this.selectedIds();
    if (ids.length < 2) {
      this.q("#prj-quality").innerHTML = '<div class="banner">select at least two viewpoints</div>';
      return;
    }
    await this.controller.project(ids, this.labelMode);
    this.renderSvg();
    this.renderQuality();
  }

  private async runScenario(): Promise<void> {
    const name = (this.q("#prj-name") as HTMLInputElement).value.trim() || "drawn path";
    try {
      await this.controller.runDrawnScenario(name);
      this.renderState();
    } catch (err) {
      this.q("#prj-state").innerHTML = `<div class="banner">${(err as Error).message}</div>`;
    }
  }

  private renderSvg(): void {
    const svg = this.q("#prj-svg");
    const doc = this.controller.doc;
    svg.innerHTML = "";
    if (!doc) {
      return;
    }
    const scale = fitScale(doc);
    const at = new Map(doc.points.map((p) => [p.id, { x: scale.x(p.x), y: scale.y(p.y) }]));

    if (this.showLinks) {
      for (const edge of doc.edges) {
        const a = at.get(edge.a)!;
        const b = at.get(edge.b)!;
        const line = document.createElementNS(SVG_NS, "line");
        line.setAttribute("x1", String(a.x));
        line.setAttribute("y1", String(a.y));
        line.setAttribute("x2", String(b.x));
        line.setAttribute("y2", String(b.y));
        line.setAttribute("class", "edge");
        svg.appendChild(line);
        const text = document.createElementNS(SVG_NS, "text");
        text.setAttribute("x", String((a.x + b.x) / 2));
        text.setAttribute("y", String((a.y + b.y) / 2 - 4));
        text.setAttribute("class", "edge-label");
        text.textContent = edgeLabel(edge, this.labelMode);
        svg.appendChild(text);
      }
    }

    const refs = this.controller.path.refs;
    for (let i = 1; i < refs.length; i++) {
      const a = at.get(refs[i - 1])!;
      const b = at.get(refs[i])!;
      const seg = document.createElementNS(SVG_NS, "line");
      seg.setAttribute("x1", String(a.x));
      seg.setAttribute("y1", String(a.y));
      seg.setAttribute("x2", String(b.x));
      seg.setAttribute("y2", String(b.y));
      seg.setAttribute("class", "path-segment");
      svg.appendChild(seg);
    }

    for (const point of doc.points) {
      const position = at.get(point.id)!;
      const order = refs
        .map((id, index) => ({ id, index }))
        .filter((entry) => entry.id === point.id)
        .map((entry) => entry.index + 1);
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(position.x));
      circle.setAttribute("cy", String(position.y));
      circle.setAttribute("r", "9");
      circle.setAttribute("class", order.length ? "point on-path" : "point");
      circle.addEventListener("click", () => {
        this.controller.clickPoint(point.id);
        this.renderSvg();
      });
      svg.appendChild(circle);
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(position.x + 12));
      text.setAttribute("y", String(position.y + 4));
      text.setAttribute("class", "point-label");
      text.textContent = order.length
        ? `${decodeURIComponent(point.id)} [${order.join(",")}]`
        : decodeURIComponent(point.id);
      svg.appendChild(text);
    }
    this.q("#prj-path").textContent = refs.length
      ? refs.map((r) => decodeURIComponent(r)).join(" → ")
      : "click points to draw";
  }

  private renderQuality(): void {
    const doc = this.controller.doc;
    const panel = this.q("#prj-quality");
    if (!doc) {
      panel.innerHTML = "";
      return;
    }
    const m = doc.metrics;
    const bins = m.histogram
      .map((b) => {
        const peak = Math.max(...m.histogram.map((x) => x.count), 1);
        const h = Math.round((b.count / peak) * 40);
        return `<div class="hist-bin" title="${shortNumber(b.lo)}..${shortNumber(b.hi)}: ${b.count}" style="height:${h + 2}px"></div>`;
      })
      .join("");
    panel.innerHTML = `
      <h3>Projection quality</h3>
      <table class="metrics">
        <tr><td>mean ratio</td><td>${m.meanRatio === null ? "n/a" : m.meanRatio}</td></tr>
        <tr><td>variance</td><td>${m.varianceRatio === null ? "n/a" : m.varianceRatio}</td></tr>
        <tr><td>excluded pairs</td><td>${m.excludedPairs}</td></tr>
      </table>
      <div class="hist">${bins}</div>
    `;
  }

  private renderState(): void {
    const summary = this.controller.lastRun;
    const target = this.q("#prj-state");
    if (!summary) {
      target.innerHTML = "";
      return;
    }
    const views = summary.views
      .map(
        (v) =>
          `<tr><td>${v.id}</td><td>${v.kind}/${v.role}</td><td>${v.relation}</td><td>${v.currentNode}</td><td>${v.attributes.join(", ")}</td></tr>`,
      )
      .join("");
    target.innerHTML = `
      <h3>Session after step ${summary.step} (${summary.viewpointName ?? ""})</h3>
      <table class="metrics">
        <tr><th>view</th><th>type</th><th>relation</th><th>node</th><th>attributes</th></tr>
        ${views}
      </table>
      <div class="dim">${summary.relations.length} relations, ${summary.filters.length} filters, ${summary.assignments} assignments</div>
    `;
  }
}
