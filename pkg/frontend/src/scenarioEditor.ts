/** Scenario editor: a drag-to-reorder strip of viewpoint cards.
 *
 * The controller owns the on-screen order and talks to the service; the
 * view is a thin DOM skin over it. Saving sends the full on-screen order
 * with the optimistic saved-at precondition; a 409 surfaces as a
 * conflict banner with a reload prompt.
 */
import { ApiError, type TraceviewApi } from "./api.js";
import { cardFromStepMeta, cardFromSummary, renderCard } from "./cards.js";
import { dropIndex, insertAt, moveItem, removeAt } from "./reorder.js";
import type { ScenarioJson, ScenarioStepJson } from "./types.js";

export class ScenarioEditorController {
  scenario: ScenarioJson | null = null;
  steps: ScenarioStepJson[] = [];
  conflict = false;

  constructor(private api: TraceviewApi) {}

  async load(id: string): Promise<void> {
    this.scenario = await this.api.getScenario(id);
    this.steps = this.scenario.steps.slice();
    this.conflict = false;
  }

  get order(): string[] {
    return this.steps.map((s) => s.viewpointId);
  }

  move(from: number, to: number): void {
    this.steps = moveItem(this.steps, from, to);
  }

  remove(index: number): void {
    this.steps = removeAt(this.steps, index);
  }

  append(viewpointId: string): void {
    this.steps = insertAt(this.steps, this.steps.length, {
      order: this.steps.length + 1,
      ref: viewpointId,
      viewpointId,
    });
  }

  /** PUT the on-screen order; false means a stale-write conflict. */
  async save(): Promise<boolean> {
    if (!this.scenario) {
      throw new Error("no scenario loaded");
    }
    try {
      this.scenario = await this.api.updateScenario(this.scenario.id, this.order, this.scenario.savedAt);
      this.steps = this.scenario.steps.slice();
      this.conflict = false;
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.conflict = true;
        return false;
      }
      throw err;
    }
  }

  /** Drop the local edits and re-read the file (conflict resolution). */
  async reload(): Promise<void> {
    if (this.scenario) {
      await this.load(this.scenario.id);
    }
  }
}

export class ScenarioEditorView {
  private controller: ScenarioEditorController;
  private root: HTMLElement;
  private previewMode = false;
  private dragIndex: number | null = null;

  constructor(
    private api: TraceviewApi,
    root: HTMLElement,
  ) {
    this.controller = new ScenarioEditorController(api);
    this.root = root;
  }

  async mount(): Promise<void> {
    this.root.innerHTML = `
      <div class="toolbar">
        <select id="scn-select"></select>
        <button id="scn-refresh">↻</button>
        <input id="scn-new-name" placeholder="new scenario name"/>
        <button id="scn-create">Create</button>
        <label><input type="checkbox" id="scn-preview"/> preview mode</label>
        <button id="scn-save" class="primary">Save order</button>
      </div>
      <div id="scn-conflict" class="banner hidden"></div>
      <div id="scn-strip" class="card-strip"></div>
      <h3>Add viewpoints (click to append)</h3>
      <div id="scn-palette" class="card-strip palette"></div>
    `;
    this.q("#scn-refresh").addEventListener("click", () => void this.refreshList());
    this.q("#scn-select").addEventListener("change", () => void this.loadSelected());
    this.q("#scn-create").addEventListener("click", () => void this.createScenario());
    this.q("#scn-save").addEventListener("click", () => void this.save());
    this.q("#scn-preview").addEventListener("change", (e) => {
      this.previewMode = (e.target as HTMLInputElement).checked;
      this.renderStrip();
    });
    await this.refreshList();
    await this.renderPalette();
  }

  private q(selector: string): HTMLElement {
    return this.root.querySelector(selector) as HTMLElement;
  }

  private async refreshList(): Promise<void> {
    const select = this.q("#scn-select") as HTMLSelectElement;
    const entries = await this.api.listScenarios();
    select.innerHTML = "";
    for (const entry of entries) {
      if (entry.broken) {
        continue;
      }
      const option = document.createElement("option");
      option.value = entry.id;
      option.textContent = `${entry.name} (${entry.stepCount} steps)`;
      select.appendChild(option);
    }
    if (select.value) {
      await this.loadSelected();
    }
  }

  private async loadSelected(): Promise<void> {
    const select = this.q("#scn-select") as HTMLSelectElement;
    if (!select.value) {
      return;
    }
    await this.controller.load(select.value);
    this.renderStrip();
  }

  private async createScenario(): Promise<void> {
    const input = this.q("#scn-new-name") as HTMLInputElement;
    const name = input.value.trim();
    if (!name) {
      return;
    }
    const created = await this.api.createScenario(name, []);
    input.value = "";
    await this.refreshList();
    (this.q("#scn-select") as HTMLSelectElement).value = created.id;
    await this.loadSelected();
  }

  private async save(): Promise<void> {
    const ok = await this.controller.save();
    this.renderConflict();
    if (ok) {
      await this.loadSelected();
    }
  }

  private renderConflict(): void {
    const banner = this.q("#scn-conflict");
    if (this.controller.conflict) {
      banner.classList.remove("hidden");
      banner.innerHTML = "Someone saved this scenario after you loaded it. ";
      const reload = document.createElement("button");
      reload.textContent = "Reload their version";
      reload.addEventListener("click", () => {
        void this.controller.reload().then(() => {
          this.renderConflict();
          this.renderStrip();
        });
      });
      banner.appendChild(reload);
    } else {
      banner.classList.add("hidden");
      banner.innerHTML = "";
    }
  }

  private renderStrip(): void {
    const strip = this.q("#scn-strip");
    strip.innerHTML = "";
    this.controller.steps.forEach((step, index) => {
      const card = renderCard(cardFromStepMeta(step.viewpointId, step.broken ?? false, step.meta));
      const badge = document.createElement("div");
      badge.className = "order-badge";
      badge.textContent = String(index + 1);
      card.prepend(badge);
      if (!this.previewMode) {
        card.draggable = true;
        card.addEventListener("dragstart", () => {
          this.dragIndex = index;
        });
        card.addEventListener("dragover", (e) => e.preventDefault());
        card.addEventListener("drop", (e) => {
          e.preventDefault();
          if (this.dragIndex === null || this.dragIndex === index) {
            return;
          }
          this.controller.move(this.dragIndex, index);
          this.dragIndex = null;
          this.renderStrip();
        });
        const remove = document.createElement("button");
        remove.className = "card-remove";
        remove.textContent = "×";
        remove.addEventListener("click", () => {
          this.controller.remove(index);
          this.renderStrip();
        });
        card.appendChild(remove);
      }
      strip.appendChild(card);
    });
    if (!this.controller.steps.length) {
      strip.innerHTML = '<div class="empty">empty scenario — click viewpoints below to add steps</div>';
    }
  }

  private async renderPalette(): Promise<void> {
    const palette = this.q("#scn-palette");
    const summaries = await this.api.listViewpoints();
    palette.innerHTML = "";
    for (const summary of summaries) {
      const card = renderCard(cardFromSummary(summary));
      card.addEventListener("click", () => {
        if (!this.previewMode && this.controller.scenario) {
          this.controller.append(summary.id);
          this.renderStrip();
        }
      });
      palette.appendChild(card);
    }
  }

  /** Pointer-free reorder hook used by tests and keyboard shortcuts. */
  dropAt(centers: number[], pointer: number, from: number): void {
    let target = dropIndex(centers, pointer);
    if (target > from) {
      target -= 1;
    }
    if (target !== from) {
      this.controller.move(from, target);
    }
  }
}
