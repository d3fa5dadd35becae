import { ApiClient } from "./api.js";
import { ComparisonView } from "./comparisonView.js";
import { ProjectionView } from "./projectionView.js";
import { ScenarioEditorView } from "./scenarioEditor.js";

const api = new ApiClient("");

const TABS: Record<string, (root: HTMLElement) => Promise<void>> = {
  scenarios: (root) => new ScenarioEditorView(api, root).mount(),
  compare: (root) => new ComparisonView(api, root).mount(),
  projection: (root) => new ProjectionView(api, root).mount(),
};

function activate(name: string): void {
  document.querySelectorAll(".tab").forEach((tab) => {
    tab.classList.toggle("active", (tab as HTMLElement).dataset.tab === name);
  });
  const root = document.getElementById("panel")!;
  root.innerHTML = '<div class="dim">loading…</div>';
  TABS[name](root).catch((err) => {
    root.innerHTML = `<div class="banner">cannot reach the service: ${err}</div>`;
  });
}

document.querySelectorAll(".tab").forEach((tab) => {
  tab.addEventListener("click", () => activate((tab as HTMLElement).dataset.tab!));
});
activate("scenarios");
