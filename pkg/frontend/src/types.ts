/** JSON payloads of the traceview service, field for field. */

export interface ViewpointSummary {
  id: string;
  broken: boolean;
  name?: string;
  savedAt?: string;
  image?: string | null;
  areaId?: string | null;
  areaIcon?: string | null;
  periodStart?: string | null;
  periodEnd?: string | null;
  description?: string;
  owner?: string;
  priority?: string;
  attitude?: string;
}

export interface DeltaJson {
  prefId: string;
  scope: string;
  instance: string;
  weight: number;
  left: string | null;
  right: string | null;
}

export interface CategoryJson {
  name: string;
  distance: number;
  deltas: DeltaJson[];
}

export interface DiffJson {
  leftId: string;
  rightId: string;
  rawDistance: number;
  maxDistance: number;
  normalizedPercent: number;
  categories: CategoryJson[];
}

export interface LayoutPointJson {
  id: string;
  x: number;
  y: number;
}

export interface LayoutEdgeJson {
  a: string;
  b: string;
  computed: number;
  layout: number;
  ratio: number | null;
}

export interface HistogramBinJson {
  lo: number;
  hi: number;
  count: number;
}

export interface LayoutMetricsJson {
  meanRatio: number | null;
  varianceRatio: number | null;
  histogram: HistogramBinJson[];
  excludedPairs: number;
}

export type LabelMode = "computed" | "layout" | "ratio";

export interface LayoutDocJson {
  points: LayoutPointJson[];
  edges: LayoutEdgeJson[];
  metrics: LayoutMetricsJson;
  defaultLabel: LabelMode;
}

export interface StepMetaJson {
  name: string;
  image: string | null;
  areaId: string | null;
  areaIcon: string | null;
  attitude: string;
  priority: string;
  owner: string;
  savedAt: string;
  description: string;
}

export interface ScenarioStepJson {
  order: number;
  ref: string;
  viewpointId: string;
  broken?: boolean;
  meta?: StepMetaJson;
}

export interface ScenarioJson {
  id: string;
  name: string;
  savedAt: string | null;
  steps: ScenarioStepJson[];
}

export interface ScenarioListEntryJson {
  id: string;
  broken: boolean;
  name?: string;
  savedAt?: string;
  stepCount?: number;
}

export interface StateSummaryJson {
  relations: { name: string; source: string; timeColumn: string | null; rows: number }[];
  views: {
    id: string;
    relation: string;
    kind: string;
    role: string;
    currentNode: string;
    attributes: string[];
    windowGeometry: number[];
  }[];
  filters: { id: string; view: string; attribute: string; criterion: string }[];
  assignments: number;
  step?: number;
  scenario?: string;
  viewpointName?: string;
}
