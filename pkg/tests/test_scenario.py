import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from traceview import (
    ApplicationState,
    MetaDraft,
    PlaybackError,
    SetCurrentNode,
    ValidationError,
    capture,
    create,
    insert_step,
    move_step,
    playback,
    preview,
    remove_step,
)
from traceview.scenario import load_xml, save_xml
from traceview.viewpoint import save_xml as save_vp


def refs(sc):
    return [s.ref for s in sc.steps]


class TestEditing:
    def test_create_is_empty(self):
        assert len(create("budget")) == 0

    def test_create_empty_name_rejected(self):
        with pytest.raises(ValidationError):
            create("")

    def test_insert_at_head(self, tmp_path):
        sc = create("s")
        sc = insert_step(sc, 1, tmp_path / "a.xml")
        sc = insert_step(sc, 2, tmp_path / "b.xml")
        sc = insert_step(sc, 1, tmp_path / "c.xml")
        assert [r.split("/")[-1] for r in refs(sc)] == ["c.xml", "a.xml", "b.xml"]
        assert [s.order for s in sc.steps] == [1, 2, 3]

    def test_insert_duplicate_ref_allowed(self, tmp_path):
        sc = insert_step(create("s"), 1, tmp_path / "a.xml")
        sc = insert_step(sc, 2, tmp_path / "a.xml")
        assert refs(sc)[0] == refs(sc)[1]

    def test_insert_position_zero_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="out of range"):
            insert_step(create("s"), 0, tmp_path / "a.xml")

    def test_move(self, tmp_path):
        sc = create("s")
        for name in ("a", "b", "c"):
            sc = insert_step(sc, len(sc) + 1, tmp_path / f"{name}.xml")
        moved = move_step(sc, 3, 1)
        assert [r.split("/")[-1] for r in refs(moved)] == ["c.xml", "a.xml", "b.xml"]
        assert move_step(sc, 1, 1) == sc

    def test_move_on_empty_rejected(self):
        with pytest.raises(ValidationError):
            move_step(create("s"), 1, 1)

    def test_remove(self, tmp_path):
        sc = create("s")
        for name in ("a", "b", "c"):
            sc = insert_step(sc, len(sc) + 1, tmp_path / f"{name}.xml")
        sc = remove_step(sc, 2)
        assert [r.split("/")[-1] for r in refs(sc)] == ["a.xml", "c.xml"]
        assert len(remove_step(remove_step(sc, 1), 1)) == 0
        with pytest.raises(ValidationError):
            remove_step(sc, 5)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from("imr"), st.integers(0, 30), st.integers(0, 30)), max_size=30))
    def test_contiguity_after_random_edits(self, ops):
        sc = create("s")
        for op, a, b in ops:
            n = len(sc)
            if op == "i":
                sc = insert_step(sc, a % (n + 1) + 1, f"/vp/{a}.xml")
            elif op == "m" and n:
                sc = move_step(sc, a % n + 1, b % n + 1)
            elif op == "r" and n:
                sc = remove_step(sc, a % n + 1)
        assert [s.order for s in sc.steps] == list(range(1, len(sc) + 1))


class TestXml:
    def test_round_trip(self, tmp_path):
        sc = create("tour")
        sc = insert_step(sc, 1, tmp_path / "viewpoints" / "a.xml")
        sc = insert_step(sc, 2, tmp_path / "b.xml")
        path = tmp_path / "scenarios" / "tour.xml"
        path.parent.mkdir()
        saved = save_xml(sc, path)
        loaded = load_xml(path)
        assert loaded == saved
        assert refs(loaded) == ["../viewpoints/a.xml", "../b.xml"]

    def test_orders_ascending_in_file(self, tmp_path):
        sc = create("s")
        for i in range(4):
            sc = insert_step(sc, 1, tmp_path / f"{i}.xml")  # always prepend
        path = tmp_path / "s.xml"
        save_xml(sc, path)
        text = path.read_text(encoding="utf-8")
        orders = [line.split('order="')[1][0] for line in text.splitlines() if "<step" in line]
        assert orders == ["1", "2", "3", "4"]

    def test_non_contiguous_orders_rejected(self, tmp_path):
        path = tmp_path / "bad.xml"
        path.write_text(
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            '<scenario format-version="1" name="x">\n'
            '  <step order="1" ref="a.xml"/>\n'
            '  <step order="3" ref="b.xml"/>\n'
            "</scenario>\n",
            encoding="utf-8",
        )
        with pytest.raises(ValidationError, match="contiguous"):
            load_xml(path)

    def test_create_save_load_round_trip(self, tmp_path):
        saved = save_xml(create("empty"), tmp_path / "e.xml")
        assert load_xml(tmp_path / "e.xml") == saved


@pytest.fixture
def scenario_world(budget_state, areas, schema, tmp_path, pinned_env):
    """Three viewpoints at different current nodes plus a scenario file."""
    paths = []
    for i, node in enumerate(("root", "1", "5")):
        budget_state.mutate_exploration(SetCurrentNode("v1", node))
        vp = capture(budget_state, MetaDraft(name=f"step{i}"), areas=areas)
        path = tmp_path / f"vp{i}.xml"
        save_vp(vp, path, schema)
        paths.append(path)
    sc = create("tour")
    for i, p in enumerate(paths):
        sc = insert_step(sc, i + 1, p)
    sc = save_xml(sc, tmp_path / "tour.xml")
    return sc, paths


class TestPlayback:
    def test_goto_restores_exact_state(self, scenario_world, schema, areas):
        sc, paths = scenario_world
        from traceview.viewpoint import load_xml as load_vp

        state = ApplicationState(schema)
        cursor = playback(sc, state, areas=areas)
        cursor.goto(2)
        expected = load_vp(paths[1], schema, areas=areas)
        assert state.snapshot() == expected.snapshot

    def test_goto_is_idempotent(self, scenario_world, schema, areas):
        sc, _ = scenario_world
        state = ApplicationState(schema)
        cursor = playback(sc, state, areas=areas)
        cursor.goto(3)
        first = state.snapshot()
        cursor.goto(3)
        assert state.snapshot() == first

    def test_next_walks_in_order_and_stops(self, scenario_world, schema, areas):
        sc, _ = scenario_world
        state = ApplicationState(schema)
        cursor = playback(sc, state, areas=areas)
        visited = []
        while cursor.next():
            visited.append(cursor.position)
        assert visited == [1, 2, 3]
        assert cursor.next() is False
        assert cursor.position == 3

    def test_prev_at_start(self, scenario_world, schema, areas):
        sc, _ = scenario_world
        cursor = playback(sc, ApplicationState(schema), areas=areas)
        assert cursor.prev() is False
        cursor.goto(2)
        assert cursor.prev() is True
        assert cursor.position == 1

    def test_missing_step_file_keeps_position(self, scenario_world, schema, areas):
        sc, paths = scenario_world
        state = ApplicationState(schema)
        cursor = playback(sc, state, areas=areas)
        cursor.goto(1)
        before = state.snapshot()
        paths[1].unlink()
        with pytest.raises(PlaybackError) as err:
            cursor.goto(2)
        assert err.value.step == 2
        assert str(paths[1]) in str(err.value)
        assert cursor.position == 1
        assert state.snapshot() == before

    def test_goto_out_of_range(self, scenario_world, schema, areas):
        sc, _ = scenario_world
        cursor = playback(sc, ApplicationState(schema), areas=areas)
        with pytest.raises(ValidationError):
            cursor.goto(9)


class TestPreview:
    def test_all_valid(self, scenario_world, areas):
        sc, _ = scenario_world
        entries = preview(sc, areas=areas)
        assert len(entries) == 3
        assert all(not e.broken for e in entries)
        assert [e.name for e in entries] == ["step0", "step1", "step2"]
        assert all(e.attitude == "neutral" and e.priority == "interesting" for e in entries)

    def test_one_broken_others_intact(self, scenario_world, areas):
        sc, paths = scenario_world
        paths[1].unlink()
        entries = preview(sc, areas=areas)
        assert [e.broken for e in entries] == [False, True, False]
        assert entries[0].name == "step0"

    def test_empty_scenario(self, areas):
        assert preview(create("empty"), areas=areas) == []

    def test_scenario_loads_even_with_missing_viewpoints(self, scenario_world):
        sc, paths = scenario_world
        for p in paths:
            p.unlink()
        loaded = load_xml(sc.path)
        assert len(loaded) == 3
