#!/usr/bin/env python3
"""Build a self-contained demo workspace under ./demo-workspace.

Loads a ministries-budget dataset, walks through an exploration,
captures six viewpoints along the way, groups them into a scenario,
and writes a pairwise diff report plus the 2D layout document. Point
the CLI or the HTTP service at the resulting directory:

    python scripts/build_demo_workspace.py
    traceview -w demo-workspace scn preview tour.xml
    traceview -w demo-workspace diff step-1.xml step-6.xml
    traceview -w demo-workspace serve --ui-dir frontend/dist
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from traceview import (
    MetaDraft,
    Priority,
    SetAttributes,
    SetCurrentNode,
    SetFilterRange,
    Workspace,
    capture,
    create,
    diff,
    diff_to_xml,
    distance_matrix,
    export_layout,
    insert_step,
    mds_project,
    quality,
    top_categories,
)
from traceview.scenario import save_xml as save_scenario
from traceview.viewpoint import save_xml as save_viewpoint

BUDGET_CSV = """\
ministry,year,budget
Education,2010,61500
Education,2011,62300
Education,2012,63100
Defense,2010,37200
Defense,2011,36900
Defense,2012,38000
Health,2010,11200
Health,2011,11800
Health,2012,12400
Culture,2010,2600
Culture,2011,2500
Culture,2012,2700
"""

SCHOOLS_CSV = """\
school,commune,pupils
Ecole Centrale,Luxembourg,420
Ecole du Parc,Luxembourg,310
Ecole des Pres,Esch-sur-Alzette,280
Ecole Saint-Michel,Diekirch,150
"""


def main() -> int:
    ws = Workspace.init("demo-workspace")
    data_dir = ws.root / "data"
    data_dir.mkdir(exist_ok=True)
    (data_dir / "budget.csv").write_text(BUDGET_CSV, encoding="utf-8")
    (data_dir / "schools.csv").write_text(SCHOOLS_CSV, encoding="utf-8")

    state = ws.load_session()
    state.load_dataset(data_dir / "budget.csv", time_column="year")
    state.add_view("overview", "budget", "pie", "master")
    state.add_view("rows", "budget", "table", "detail")

    steps = [
        ("The whole budget at a glance", lambda: None),
        ("Focus on education", lambda: state.mutate_exploration(SetCurrentNode("overview", "0"))),
        ("Education, amounts only", lambda: state.mutate_exploration(SetAttributes("overview", ("ministry", "budget")))),
        ("Small budgets highlighted", lambda: (
            state.add_filter("small", "overview", "budget", lo=0, hi=15000),
        )),
        ("Narrow the highlight band", lambda: state.mutate_exploration(
            SetFilterRange("small", 0, 5000)
        )),
        ("Schools loaded alongside", lambda: (
            state.load_dataset(data_dir / "schools.csv"),
            state.add_view("schools", "schools", "treemap", "master"),
        )),
    ]

    vp_paths = []
    for i, (description, mutate) in enumerate(steps, start=1):
        mutate()
        priority = Priority.MUST_SEE if i in (1, 6) else Priority.INTERESTING
        vp = capture(
            state,
            MetaDraft(name=f"step {i}", description=description, priority=priority, area_id="fr"),
            areas=ws.areas,
        )
        path = ws.viewpoint_dir / f"step-{i}.xml"
        save_viewpoint(vp, path, ws.schema)
        vp_paths.append(path)
        print(f"saved {path}")
    ws.save_session(state)

    sc = create("ministries tour")
    for i, path in enumerate(vp_paths, start=1):
        sc = insert_step(sc, i, path)
    sc = save_scenario(sc, ws.scenario_dir / "tour.xml")
    print(f"saved {sc.path} ({len(sc.steps)} steps)")

    viewpoints = [ws.load_viewpoint(p) for p in vp_paths]
    report = diff(viewpoints[0], viewpoints[-1], ws.schema)
    diff_to_xml(report, ws.root / "diff-step1-step6.xml")
    print(f"\nstep 1 vs step 6: {float(report.normalized_percent):.1f}% different")
    for name, distance in top_categories(report):
        print(f"  {name}: {distance}")

    labels = [p.name for p in vp_paths]
    matrix = distance_matrix(viewpoints, ws.schema, labels=labels)
    layout = mds_project(matrix)
    metrics = quality(matrix, layout)
    document = export_layout(layout, metrics)
    import json

    (ws.root / "layout.json").write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    print(f"\nlayout written to {ws.root / 'layout.json'}")
    if metrics.mean_ratio is not None:
        print(f"projection quality: mean ratio {metrics.mean_ratio:.4f}, variance {metrics.variance_ratio:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
