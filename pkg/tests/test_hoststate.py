import random
from datetime import date
from decimal import Decimal

import pytest

from traceview import (
    ApplicationState,
    AssignmentKey,
    MissingDatasetError,
    MoveWindow,
    ScopeLevel,
    SetAttributes,
    SetCurrentNode,
    SetFilterRange,
    UnknownPreferenceError,
    ValidationError,
)
from traceview.hoststate import encode_filters, temporal_bounds


def simple_state(schema, tmp_path, rows=None):
    csv_path = tmp_path / "data.csv"
    body = rows or "name,year,amount\na,2010,1\nb,2011,2\nc,2012,3\n"
    csv_path.write_text(body, encoding="utf-8")
    state = ApplicationState(schema)
    state.load_dataset(csv_path, time_column="year")
    state.add_view("v1", "data", "pie", "master")
    return state, csv_path


# ── Dataset loading ────────────────────────────────────────────────────


class TestLoadDataset:
    def test_kind_inference_against_oracle(self, schema, ministries_csv):
        # Oracle: column-wise re-parse of the fixture, independent of the
        # engine's inference helpers.
        import csv as csvmod

        with open(ministries_csv, newline="", encoding="utf-8") as handle:
            reader = csvmod.reader(handle)
            header = next(reader)
            rows = list(reader)

        def oracle_kind(idx, designated):
            values = [r[idx] for r in rows if r[idx]]

            def all_dates():
                ok = True
                for v in values:
                    if len(v) == 4 and v.isdigit():
                        continue
                    try:
                        date.fromisoformat(v)
                    except ValueError:
                        ok = False
                        break
                return ok and bool(values)

            def all_numbers():
                try:
                    for v in values:
                        float(v)
                    return bool(values)
                except ValueError:
                    return False

            if designated and all_dates():
                return "temporal"
            if all_numbers():
                return "numeric"
            if all_dates():
                return "temporal"
            return "text"

        state = ApplicationState(schema)
        rel = state.load_dataset(ministries_csv, time_column="year")
        for idx, col in enumerate(rel.columns):
            assert col.kind == oracle_kind(idx, header[idx] == "year"), col.name
        assert [c.kind for c in rel.columns] == ["text", "temporal", "numeric"]

    def test_without_designation_year_is_numeric(self, schema, ministries_csv):
        state = ApplicationState(schema)
        rel = state.load_dataset(ministries_csv)
        assert [c.kind for c in rel.columns] == ["text", "numeric", "numeric"]

    def test_empty_file_has_no_header(self, schema, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("", encoding="utf-8")
        with pytest.raises(ValidationError, match="no header"):
            ApplicationState(schema).load_dataset(empty)

    def test_duplicate_name_rejected(self, schema, ministries_csv):
        state = ApplicationState(schema)
        state.load_dataset(ministries_csv)
        with pytest.raises(ValidationError, match="duplicate relation"):
            state.load_dataset(ministries_csv)

    def test_ragged_row_rejected(self, schema, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n3\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="ragged"):
            ApplicationState(schema).load_dataset(bad)

    def test_relation_scope_assignments_created(self, schema, ministries_csv):
        state = ApplicationState(schema)
        state.load_dataset(ministries_csv, time_column="year")
        key = AssignmentKey("relation.source", ScopeLevel.RELATION, "ministries_budget")
        assert state.assignments[key] == str(ministries_csv)
        key = AssignmentKey("relation.time-column", ScopeLevel.RELATION, "ministries_budget")
        assert state.assignments[key] == "year"


# ── set_preference ─────────────────────────────────────────────────────


class TestSetPreference:
    def test_application_pref_at_view_scope_rejected(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        key = AssignmentKey("app.master-detail-count", ScopeLevel.VIEW, "v1")
        with pytest.raises(ValidationError, match="not applicable"):
            state.set_preference(key, 3)

    def test_set_then_read_back(self, schema):
        state = ApplicationState(schema)
        key = AssignmentKey("timeline.max-periods", ScopeLevel.APPLICATION)
        state.set_preference(key, 7)
        assert state.assignments[key] == "7"
        state.set_preference(key, 7)  # idempotent
        assert state.assignments[key] == "7"

    def test_boolean_pref_type_mismatch(self, schema):
        state = ApplicationState(schema)
        key = AssignmentKey("pie.slice-color-semantics", ScopeLevel.APPLICATION)
        with pytest.raises(ValidationError):
            state.set_preference(key, "42")

    def test_unknown_pref(self, schema):
        state = ApplicationState(schema)
        with pytest.raises(UnknownPreferenceError):
            state.set_preference(AssignmentKey("no.such", ScopeLevel.APPLICATION), 1)

    def test_dangling_instance(self, schema):
        state = ApplicationState(schema)
        key = AssignmentKey("view.current-node", ScopeLevel.VIEW, "ghost")
        with pytest.raises(ValidationError, match="unknown view"):
            state.set_preference(key, "root")

    def test_derived_relation_prefs_read_only(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        key = AssignmentKey("relation.source", ScopeLevel.RELATION, "data")
        with pytest.raises(ValidationError, match="read-only"):
            state.set_preference(key, "/elsewhere.csv")

    def test_structural_pref_syncs_view(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.set_preference(AssignmentKey("view.current-node", ScopeLevel.VIEW, "v1"), "2")
        assert state.views["v1"].current_node == "2"


# ── mutate_exploration ─────────────────────────────────────────────────


class TestMutateExploration:
    def test_current_node_updates_both_sides(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.mutate_exploration(SetCurrentNode("v1", "1"))
        assert state.views["v1"].current_node == "1"
        key = AssignmentKey("view.current-node", ScopeLevel.VIEW, "v1")
        assert state.assignments[key] == "1"

    def test_master_propagates_to_details(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.add_view("v2", "data", "table", "detail")
        state.mutate_exploration(SetCurrentNode("v1", "2"))
        assert state.views["v2"].current_node == "2"

    def test_detail_does_not_propagate(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.add_view("v2", "data", "table", "detail")
        state.mutate_exploration(SetCurrentNode("v2", "1"))
        assert state.views["v1"].current_node == "root"

    def test_bad_filter_range_rejected(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.add_filter("f1", "v1", "amount", lo=0, hi=10)
        with pytest.raises(ValidationError, match="lo"):
            state.mutate_exploration(SetFilterRange("f1", Decimal(5), Decimal(2)))

    def test_non_column_attribute_rejected(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        with pytest.raises(ValidationError, match="unknown column"):
            state.mutate_exploration(SetAttributes("v1", ("nope",)))

    def test_node_out_of_range_rejected(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        with pytest.raises(ValidationError, match="out of range"):
            state.mutate_exploration(SetCurrentNode("v1", "99"))

    def test_move_window(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.mutate_exploration(MoveWindow("v1", 10, 20, 640, 480))
        assert state.views["v1"].window_geometry == (10, 20, 640, 480)
        key = AssignmentKey("view.window-geometry", ScopeLevel.VIEW, "v1")
        assert state.assignments[key] == "10,20,640,480"


# ── Snapshot / restore ─────────────────────────────────────────────────


def reconstruct_implicit(state):
    """Oracle: rebuild the structural assignments from host structure."""
    expected = {}
    for rel in state.relations.values():
        expected[AssignmentKey("relation.source", ScopeLevel.RELATION, rel.name)] = rel.source
        expected[AssignmentKey("relation.time-column", ScopeLevel.RELATION, rel.name)] = rel.time_column or ""
    for view in state.views.values():
        expected[AssignmentKey("view.current-node", ScopeLevel.VIEW, view.id)] = view.current_node
        expected[AssignmentKey("view.attributes", ScopeLevel.VIEW, view.id)] = ",".join(view.attributes)
        expected[AssignmentKey("view.kind", ScopeLevel.VIEW, view.id)] = view.kind
        x, y, w, h = view.window_geometry
        expected[AssignmentKey("view.window-geometry", ScopeLevel.VIEW, view.id)] = f"{x},{y},{w},{h}"
        expected[AssignmentKey("filter.criteria", ScopeLevel.VIEW, view.id)] = encode_filters(
            [f for f in state.filters.values() if f.view == view.id]
        )
    return expected


def random_mutation(rng, state, extra_csvs):
    roll = rng.random()
    views = list(state.views)
    if roll < 0.25 and views:
        vid = rng.choice(views)
        rel = state.relations[state.views[vid].relation]
        node = rng.choice(["root"] + [str(i) for i in range(len(rel.rows))])
        state.mutate_exploration(SetCurrentNode(vid, node))
    elif roll < 0.40 and views:
        vid = rng.choice(views)
        cols = list(state.relations[state.views[vid].relation].column_names())
        rng.shuffle(cols)
        state.mutate_exploration(SetAttributes(vid, tuple(cols[: rng.randint(0, len(cols))])))
    elif roll < 0.50 and views:
        vid = rng.choice(views)
        state.mutate_exploration(
            MoveWindow(vid, rng.randint(-50, 2000), rng.randint(-50, 1200), rng.randint(100, 1920), rng.randint(100, 1080))
        )
    elif roll < 0.60 and views:
        fid = f"f{rng.randrange(10_000)}"
        if fid not in state.filters:
            vid = rng.choice(views)
            cols = state.relations[state.views[vid].relation].column_names()
            lo = rng.randint(-100, 100)
            state.add_filter(fid, vid, rng.choice(cols), lo=lo, hi=lo + rng.randint(0, 500))
    elif roll < 0.68 and state.filters:
        fid = rng.choice(list(state.filters))
        lo = Decimal(rng.randint(-100, 100))
        state.mutate_exploration(SetFilterRange(fid, lo, lo + rng.randint(0, 300)))
    elif roll < 0.76:
        vid = f"v{rng.randrange(10_000)}"
        if vid not in state.views and state.relations:
            state.add_view(
                vid,
                rng.choice(list(state.relations)),
                rng.choice(("table", "pie", "treemap", "temporal")),
                rng.choice(("master", "detail")),
            )
    elif roll < 0.82 and extra_csvs:
        path = extra_csvs.pop()
        state.load_dataset(path)
    else:
        explicit = [d for d in state.schema.preferences if d.origin == "explicit"]
        definition = rng.choice(explicit)
        scope = rng.choice(sorted(definition.scopes, key=lambda s: s.order))
        if scope is ScopeLevel.APPLICATION:
            instance = ""
        elif scope is ScopeLevel.RELATION:
            if not state.relations:
                return
            instance = rng.choice(list(state.relations))
        else:
            if not views:
                return
            instance = rng.choice(views)
        from vpgen import random_value

        state.set_preference(AssignmentKey(definition.id, scope, instance), random_value(rng, definition.kind))


class TestSnapshotRestore:
    def test_fresh_state_snapshot_is_application_defaults(self, schema):
        state = ApplicationState(schema)
        snap = state.snapshot()
        assert snap.relations == () and snap.views == ()
        expected = {
            AssignmentKey(d.id, ScopeLevel.APPLICATION): d.default
            for d in schema.preferences
            if ScopeLevel.APPLICATION in d.scopes
        }
        assert snap.assignment_map == expected

    def test_snapshot_matches_shadow_replay(self, schema, tmp_path):
        # Oracle: replay the same mutations into a plain dict.
        state, _ = simple_state(schema, tmp_path)
        shadow = dict(state.snapshot().assignment_map)
        mutations = [
            (SetCurrentNode("v1", "1"), AssignmentKey("view.current-node", ScopeLevel.VIEW, "v1"), "1"),
            (SetAttributes("v1", ("name", "amount")), AssignmentKey("view.attributes", ScopeLevel.VIEW, "v1"), "name,amount"),
            (MoveWindow("v1", 1, 2, 300, 400), AssignmentKey("view.window-geometry", ScopeLevel.VIEW, "v1"), "1,2,300,400"),
        ]
        for action, key, value in mutations:
            state.mutate_exploration(action)
            shadow[key] = value
        assert state.snapshot().assignment_map == shadow

    def test_snapshot_is_stable_and_pure(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        before = state.snapshot()
        again = state.snapshot()
        assert before == again

    def test_restore_identity(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.mutate_exploration(SetCurrentNode("v1", "2"))
        snap = state.snapshot()
        state.restore(snap)
        assert state.snapshot() == snap

    def test_restore_onto_fresh_state(self, schema, tmp_path):
        state, _ = simple_state(schema, tmp_path)
        state.add_filter("f1", "v1", "amount", lo=1, hi=2)
        other = ApplicationState(schema)
        other.restore(state.snapshot())
        assert other == state

    def test_restore_missing_csv(self, schema, tmp_path):
        state, csv_path = simple_state(schema, tmp_path)
        snap = state.snapshot()
        csv_path.unlink()
        fresh = ApplicationState(schema)
        with pytest.raises(MissingDatasetError) as err:
            fresh.restore(snap)
        assert str(csv_path) in str(err.value)

    def test_randomized_restore_and_bijection(self, schema, tmp_path, ministries_csv, schools_csv):
        rng = random.Random(20260808)
        for case in range(40):
            state = ApplicationState(schema)
            state.load_dataset(ministries_csv, time_column="year")
            state.add_view("v1", "ministries_budget", "pie", "master")
            extra = [schools_csv]
            for _ in range(rng.randint(0, 50)):
                random_mutation(rng, state, extra)
            expected_implicit = reconstruct_implicit(state)
            for key, value in expected_implicit.items():
                assert state.assignments[key] == value, key
            fresh = ApplicationState(schema)
            fresh.restore(state.snapshot())
            assert fresh == state, f"case {case}"


class TestTemporalBounds:
    def test_year_spans_whole_year(self):
        assert temporal_bounds("2010") == (date(2010, 1, 1), date(2010, 12, 31))

    def test_date_is_a_point(self):
        assert temporal_bounds("2011-05-17") == (date(2011, 5, 17), date(2011, 5, 17))
