/** In-memory stand-in for the service, good enough for controller flows:
 * scenarios persist across load/save, goto records the visit order. */
import type { TraceviewApi } from "../src/api.js";
import { ApiError } from "../src/api.js";
import type {
  DiffJson,
  LabelMode,
  LayoutDocJson,
  ScenarioJson,
  ScenarioListEntryJson,
  StateSummaryJson,
  ViewpointSummary,
} from "../src/types.js";

interface StoredScenario {
  name: string;
  steps: string[];
  savedAt: string;
}

export class FakeApi implements TraceviewApi {
  scenarios = new Map<string, StoredScenario>();
  viewpoints: ViewpointSummary[] = [];
  diffResult: DiffJson | null = null;
  layoutResult: LayoutDocJson | null = null;
  gotoLog: { scenario: string; step: number; viewpointId: string }[] = [];
  private clock = 0;

  addViewpoint(id: string, name: string): void {
    this.viewpoints.push({
      id,
      broken: false,
      name,
      savedAt: "2026-08-08T12:00:00Z",
      priority: "interesting",
      attitude: "neutral",
      owner: "analyst",
      description: "",
    });
  }

  private tick(): string {
    this.clock += 1;
    return `2026-08-08T12:00:${String(this.clock).padStart(2, "0")}Z`;
  }

  private toJson(id: string, stored: StoredScenario): ScenarioJson {
    return {
      id,
      name: stored.name,
      savedAt: stored.savedAt,
      steps: stored.steps.map((viewpointId, index) => ({
        order: index + 1,
        ref: viewpointId,
        viewpointId,
        broken: false,
        meta: {
          name: this.viewpoints.find((v) => v.id === viewpointId)?.name ?? viewpointId,
          image: null,
          areaId: null,
          areaIcon: null,
          attitude: "neutral",
          priority: "interesting",
          owner: "analyst",
          savedAt: "2026-08-08T12:00:00Z",
          description: "",
        },
      })),
    };
  }

  async listViewpoints(): Promise<ViewpointSummary[]> {
    return this.viewpoints.slice();
  }

  async diff(): Promise<DiffJson> {
    if (!this.diffResult) {
      throw new ApiError(404, "not-found", "no diff configured");
    }
    return this.diffResult;
  }

  async layout(ids: string[], _label?: LabelMode): Promise<LayoutDocJson> {
    if (this.layoutResult) {
      return this.layoutResult;
    }
    return {
      points: ids.map((id, i) => ({ id, x: i, y: 0 })),
      edges: [],
      metrics: { meanRatio: 1, varianceRatio: 0, histogram: [], excludedPairs: 0 },
      defaultLabel: "computed",
    };
  }

  async listScenarios(): Promise<ScenarioListEntryJson[]> {
    return Array.from(this.scenarios, ([id, s]) => ({
      id,
      broken: false,
      name: s.name,
      savedAt: s.savedAt,
      stepCount: s.steps.length,
    }));
  }

  async getScenario(id: string): Promise<ScenarioJson> {
    const stored = this.scenarios.get(id);
    if (!stored) {
      throw new ApiError(404, "not-found", `unknown scenario ${id}`);
    }
    return this.toJson(id, stored);
  }

  async createScenario(name: string, refs: string[]): Promise<ScenarioJson> {
    const id = `scenarios%2F${name.replace(/[^a-z0-9-]+/gi, "-")}.xml`;
    this.scenarios.set(id, { name, steps: refs.slice(), savedAt: this.tick() });
    return this.getScenario(id);
  }

  async updateScenario(id: string, steps: string[], savedAt: string | null): Promise<ScenarioJson> {
    const stored = this.scenarios.get(id);
    if (!stored) {
      throw new ApiError(404, "not-found", `unknown scenario ${id}`);
    }
    if (savedAt !== null && savedAt !== stored.savedAt) {
      throw new ApiError(409, "stale-write", `expected ${savedAt}, file is at ${stored.savedAt}`);
    }
    stored.steps = steps.slice();
    stored.savedAt = this.tick();
    return this.getScenario(id);
  }

  async goto(scenarioId: string, step: number): Promise<StateSummaryJson> {
    const stored = this.scenarios.get(scenarioId);
    if (!stored) {
      throw new ApiError(404, "not-found", `unknown scenario ${scenarioId}`);
    }
    if (step < 1 || step > stored.steps.length) {
      throw new ApiError(400, "validation", `step ${step} out of range`);
    }
    const viewpointId = stored.steps[step - 1];
    this.gotoLog.push({ scenario: scenarioId, step, viewpointId });
    return {
      relations: [],
      views: [],
      filters: [],
      assignments: 0,
      step,
      scenario: scenarioId,
      viewpointName: viewpointId,
    };
  }
}
