"""Acceptance criteria, one test per criterion, each timed against its
stated budget. A one-line PASS/FAIL summary per criterion prints in the
terminal summary (see conftest.record_acceptance)."""
import json
import math
import random
import time
from decimal import Decimal

import pytest
from fastapi.testclient import TestClient

from traceview import (
    ApplicationState,
    MetaDraft,
    PlaybackError,
    SetCurrentNode,
    Workspace,
    capture,
    create,
    diff,
    diff_from_xml,
    insert_step,
    lookup,
    mds_project,
    playback,
    quality,
    top_categories,
)
from traceview.cli import main
from traceview.scenario import save_xml as save_scn
from traceview.server import create_app
from traceview.viewpoint import load_xml as load_vp
from traceview.viewpoint import save_xml as save_vp
from traceview.viewpoint import to_xml

from conftest import record_acceptance
from test_diff import vp_from_assignments
from test_hoststate import random_mutation
from vpgen import applicable_keys, axiom_viewpoint, random_value, random_viewpoint


class Budget:
    """Context manager asserting a wall-clock budget and recording it."""

    def __init__(self, name: str, seconds: float, detail: str = ""):
        self.name = name
        self.seconds = seconds
        self.detail = detail

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.seconds
        record_acceptance(self.name, ok, elapsed, self.detail)
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} took {elapsed:.2f}s (budget {self.seconds}s)"
        return False


def test_viewpoint_xml_round_trip_1000(schema, areas, tmp_path, pinned_env):
    rng = random.Random(0xC0FFEE)
    with Budget("viewpoint XML round-trip (1000 randomized)", 10.0):
        for i in range(1000):
            vp = random_viewpoint(rng, schema, areas)
            path = tmp_path / f"vp{i}.xml"
            saved = save_vp(vp, path, schema, clock=vp.file_meta.saved_at)
            loaded = load_vp(path, schema, areas=areas)
            assert loaded == saved, f"case {i}: not deep-equal"
            assert to_xml(loaded, schema) == path.read_text(encoding="utf-8"), f"case {i}: bytes differ"


def test_state_restore_500_random_sequences(schema, ministries_csv, schools_csv, areas):
    rng = random.Random(0xB00C)
    with Budget("state restore (500 randomized mutation sequences)", 10.0):
        for case in range(500):
            state = ApplicationState(schema)
            state.load_dataset(ministries_csv, time_column="year")
            state.add_view("v1", "ministries_budget", "pie", "master")
            extra = [schools_csv]
            for _ in range(rng.randint(0, 50)):
                random_mutation(rng, state, extra)
            vp = capture(state, MetaDraft(name=f"case{case}"), areas=areas)
            fresh = ApplicationState(schema)
            from traceview import apply as apply_vp

            apply_vp(vp, fresh)
            assert fresh == state, f"case {case}"


def test_distance_metric_axioms_10000_triples(schema):
    rng = random.Random(0xD157)
    pairs = applicable_keys(schema)
    with Budget("distance metric axioms (10000 triples)", 20.0):
        for case in range(10_000):
            v1 = axiom_viewpoint(rng, schema, pairs, "v1")
            v2 = axiom_viewpoint(rng, schema, pairs, "v2")
            v3 = axiom_viewpoint(rng, schema, pairs, "v3")
            r12 = diff(v1, v2, schema)
            d12 = r12.raw_distance
            assert diff(v1, v1, schema).raw_distance == 0
            assert diff(v2, v1, schema).raw_distance == d12  # symmetry, exact
            d13 = diff(v1, v3, schema).raw_distance
            d32 = diff(v3, v2, schema).raw_distance
            assert d12 <= d13 + d32, f"triangle violated at case {case}"
            assert Decimal(0) <= r12.normalized_percent <= Decimal(100)
            assert (d12 == 0) == (v1.snapshot.assignment_map == v2.snapshot.assignment_map)
            # 100% exactly when every union key differs
            assert (r12.normalized_percent == 100) == (
                r12.max_distance > 0 and d12 == r12.max_distance
            )
        # fully-disjoint constructed pairs land exactly at 100%
        for case in range(200):
            keys = [k for k, _ in pairs]
            rng.shuffle(keys)
            cut = rng.randint(1, len(keys) - 1)
            defs = dict(pairs)
            left = {k: random_value(rng, defs[k].kind) for k in keys[:cut]}
            right = {k: random_value(rng, defs[k].kind) for k in keys[cut:]}
            report = diff(
                vp_from_assignments(schema, "L", left),
                vp_from_assignments(schema, "R", right),
                schema,
            )
            assert report.normalized_percent == Decimal(100), f"disjoint case {case}"


def test_fig5_qualitative_reproduction(budget_state, areas, schema):
    from traceview import AssignmentKey, MoveWindow, ScopeLevel, SetAttributes

    with Budget("top-3 category attribution (constructed pair)", 10.0):
        left = capture(budget_state, MetaDraft(name="left"), areas=areas)
        budget_state.mutate_exploration(SetAttributes("v1", ("ministry", "budget")))
        budget_state.mutate_exploration(SetCurrentNode("v1", "3"))
        budget_state.set_preference(AssignmentKey("app.master-detail-count", ScopeLevel.APPLICATION), 3)
        budget_state.mutate_exploration(MoveWindow("v1", 40, 40, 1024, 768))
        budget_state.set_preference(AssignmentKey("timeline.max-periods", ScopeLevel.APPLICATION), 5)
        budget_state.set_preference(
            AssignmentKey("view.period-start", ScopeLevel.VIEW, "v1"), "2011-01-01"
        )
        right = capture(budget_state, MetaDraft(name="right"), areas=areas)

        report = diff(left, right, schema)
        # golden order under the shipped weights
        assert [name for name, _ in top_categories(report)] == [
            "data-displayed",
            "ui-global-layout",
            "timeline",
        ]
        assert {c.category for c in report.categories} == {
            "data-displayed",
            "ui-global-layout",
            "timeline",
        }
        # hand-sum oracle, exact arithmetic
        lm, rm = left.snapshot.assignment_map, right.snapshot.assignment_map
        expected = sum(
            (lookup(schema, k.pref_id).weight for k in set(lm) | set(rm) if lm.get(k) != rm.get(k)),
            Decimal(0),
        )
        assert report.raw_distance == expected == Decimal("17.25")


def test_mds_exactness_200_planar_sets():
    rng = random.Random(0x2D)
    with Budget("MDS exactness (200 planar sets)", 10.0):
        from test_projection import matrix_from_points

        for case in range(200):
            n = rng.randint(2, 12)
            pts = [(rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(n)]
            m = matrix_from_points(pts)
            layout = mds_project(m)
            worst = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    worst = max(worst, abs(layout.distance(i, j) - m.values[i][j]))
            assert worst <= 1e-6, f"case {case}: max error {worst}"
            metrics = quality(m, layout)
            if metrics.mean_ratio is not None:
                assert abs(metrics.mean_ratio - 1.0) <= 1e-9, f"case {case}"
                assert metrics.variance_ratio <= 1e-12, f"case {case}"
        # closed-form cases
        equilateral = matrix_from_points([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)])
        layout = mds_project(equilateral)
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(layout.distance(i, j) - 1.0) <= 1e-9
        from traceview import DistanceMatrix

        collinear = DistanceMatrix(("a", "b", "c"), ((0.0, 1.0, 2.0), (1.0, 0.0, 1.0), (2.0, 1.0, 0.0)))
        layout = mds_project(collinear)
        assert abs(layout.distance(0, 2) - 2.0) <= 1e-9
        assert abs(layout.eigenvalues[1]) <= 1e-9


def test_scenario_playback_demo(schema, areas, ministries_csv, tmp_path, pinned_env):
    with Budget("scenario playback (6-viewpoint demo)", 5.0):
        state = ApplicationState(schema)
        state.load_dataset(ministries_csv, time_column="year")
        state.add_view("v1", "ministries_budget", "pie", "master")
        paths = []
        for i in range(6):
            state.mutate_exploration(SetCurrentNode("v1", str(2 * i)))
            vp = capture(state, MetaDraft(name=f"ministry step {i + 1}"), areas=areas)
            path = tmp_path / f"vp{i + 1}.xml"
            save_vp(vp, path, schema)
            paths.append(path)
        sc = create("ministries tour")
        for i, p in enumerate(paths):
            sc = insert_step(sc, i + 1, p)
        sc = save_scn(sc, tmp_path / "tour.xml")

        player_state = ApplicationState(schema)
        cursor = playback(sc, player_state, areas=areas)
        for i in range(1, 7):
            cursor.goto(i)
            expected = load_vp(paths[i - 1], schema, areas=areas)
            assert player_state.snapshot() == expected.snapshot, f"step {i}"

        paths[3].unlink()  # viewpoint 4
        cursor.goto(3)
        snap_at_3 = player_state.snapshot()
        with pytest.raises(PlaybackError) as err:
            cursor.goto(4)
        assert err.value.step == 4
        assert "step 4" in str(err.value)
        assert cursor.position == 3
        assert player_state.snapshot() == snap_at_3
        cursor.goto(3)  # still fine
        assert player_state.snapshot() == snap_at_3


def test_cli_service_parity_100_pairs(schema, areas, tmp_path, pinned_env):
    rng = random.Random(0xFA11)
    ws = Workspace.init(tmp_path / "ws")
    files = []
    for i in range(15):
        vp = random_viewpoint(rng, schema, areas)
        path = ws.viewpoint_dir / f"r{i}.xml"
        save_vp(vp, path, ws.schema, clock=vp.file_meta.saved_at)
        files.append(path)
    client = TestClient(create_app(ws), raise_server_exceptions=False)
    with Budget("CLI/service parity (100 random pairs)", 30.0):
        for case in range(100):
            a, b = rng.choice(files), rng.choice(files)
            out = tmp_path / f"d{case}.xml"
            code = main(["-w", str(ws.root), "diff", str(a), str(b), "--xml", str(out)])
            assert code == 0
            from_cli = diff_from_xml(out)
            response = client.post("/diff", json={"left": ws.id_for(a), "right": ws.id_for(b)})
            assert response.status_code == 200
            body = response.json()
            assert body["rawDistance"] == float(from_cli.raw_distance)
            assert body["maxDistance"] == float(from_cli.max_distance)
            assert body["normalizedPercent"] == float(from_cli.normalized_percent)
            assert [c["name"] for c in body["categories"]] == [
                c.category for c in from_cli.categories
            ], f"case {case}"
