/** Thin typed client over the service's JSON API.
 *
 * The UI does no distance or projection math of its own; every number it
 * shows comes back from these calls untouched.
 */
import type {
  DiffJson,
  LabelMode,
  LayoutDocJson,
  ScenarioJson,
  ScenarioListEntryJson,
  StateSummaryJson,
  ViewpointSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parse<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http";
  let message = `${response.status}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep defaults
  }
  throw new ApiError(response.status, code, message);
}

/** What the views and controllers actually depend on; tests substitute
 * a fake implementing this. */
export interface TraceviewApi {
  listViewpoints(): Promise<ViewpointSummary[]>;
  diff(left: string, right: string): Promise<DiffJson>;
  layout(ids: string[], label?: LabelMode): Promise<LayoutDocJson>;
  listScenarios(): Promise<ScenarioListEntryJson[]>;
  getScenario(id: string): Promise<ScenarioJson>;
  createScenario(name: string, refs: string[]): Promise<ScenarioJson>;
  updateScenario(id: string, steps: string[], savedAt: string | null): Promise<ScenarioJson>;
  goto(scenarioId: string, step: number): Promise<StateSummaryJson>;
}

export class ApiClient implements TraceviewApi {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.base + path).then((r) => parse<T>(r));
  }

  private send<T>(method: string, path: string, body: unknown, headers: Record<string, string> = {}): Promise<T> {
    return this.fetchFn(this.base + path, {
      method,
      headers: { "Content-Type": "application/json", ...headers },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  listViewpoints(): Promise<ViewpointSummary[]> {
    return this.get("/viewpoints");
  }

  diff(left: string, right: string): Promise<DiffJson> {
    return this.send("POST", "/diff", { left, right });
  }

  layout(ids: string[], label: LabelMode = "computed"): Promise<LayoutDocJson> {
    return this.send("POST", "/layout", { ids, label });
  }

  listScenarios(): Promise<ScenarioListEntryJson[]> {
    return this.get("/scenarios");
  }

  getScenario(id: string): Promise<ScenarioJson> {
    return this.get(`/scenarios/${id}`);
  }

  createScenario(name: string, refs: string[]): Promise<ScenarioJson> {
    return this.send("POST", "/scenarios", { name, refs });
  }

  /** Full-order replacement; savedAt is the optimistic precondition. */
  updateScenario(id: string, steps: string[], savedAt: string | null): Promise<ScenarioJson> {
    const headers: Record<string, string> = {};
    if (savedAt) {
      headers["X-Saved-At"] = savedAt;
    }
    return this.send("PUT", `/scenarios/${id}`, { steps }, headers);
  }

  goto(scenarioId: string, step: number): Promise<StateSummaryJson> {
    return this.send("POST", `/scenarios/${scenarioId}/goto`, { step });
  }
}
