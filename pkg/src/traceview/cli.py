"""Command-line entry point.

The CLI keeps a persistent working session per workspace (stored as a
viewpoint file, session.xml), so `load`, `set` and `explore` compose
across invocations and `vp save` captures whatever the session holds.

Exit codes: 0 success, 2 validation error, 1 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal

from . import projection, scenario, viewpoint
from .diff import diff as diff_viewpoints
from .diff import diff_to_xml, distance_matrix, top_categories
from .errors import StorageError, TraceViewError, ValidationError
from .hoststate import ApplicationState, MoveWindow, SetAttributes, SetCurrentNode, SetFilterRange
from .schema import AssignmentKey, ScopeLevel, format_decimal, load_schema, total_weight
from .viewpoint import Attitude, MetaDraft, Priority
from .workspace import Workspace


def _resolve(path: str, default_dir) -> str:
    """Bare filenames land in the workspace's artifact directory."""
    if os.path.isabs(path) or os.sep in path or "/" in path:
        return path
    return str(default_dir / path)


def _parse_scope(token: str) -> AssignmentKey | tuple[ScopeLevel, str]:
    if token == "application":
        return ScopeLevel.APPLICATION, ""
    for prefix, level in (("relation:", ScopeLevel.RELATION), ("view:", ScopeLevel.VIEW)):
        if token.startswith(prefix):
            instance = token[len(prefix):]
            if not instance:
                raise ValidationError(f"scope {token!r} is missing its instance name")
            return level, instance
    raise ValidationError(
        f"bad scope {token!r}: use application, relation:<name> or view:<id>"
    )


def _state_lines(state: ApplicationState) -> list[str]:
    lines = []
    for rel in sorted(state.relations.values(), key=lambda r: r.name):
        tc = f", time column {rel.time_column}" if rel.time_column else ""
        lines.append(f"  relation {rel.name}: {len(rel.rows)} rows from {rel.source}{tc}")
    for view in sorted(state.views.values(), key=lambda v: v.id):
        lines.append(
            f"  view {view.id}: {view.kind} {view.role} on {view.relation}, "
            f"node {view.current_node}, attributes [{', '.join(view.attributes)}]"
        )
    for f in sorted(state.filters.values(), key=lambda f: f.id):
        lines.append(f"  filter {f.id} on {f.view}.{f.attribute}: {f.criterion}")
    lines.append(f"  {len(state.assignments)} preference assignments")
    return lines


# ── Subcommand handlers ────────────────────────────────────────────────


def cmd_init(args) -> int:
    ws = Workspace.init(args.workspace)
    print(f"initialized workspace at {ws.root}")
    print(f"  schema: {ws.schema_path} ({len(ws.schema.preferences)} preferences)")
    return 0


def cmd_schema_validate(args) -> int:
    if args.path:
        schema = load_schema(args.path)
        source = args.path
    else:
        ws = Workspace.open(args.workspace)
        schema = ws.schema
        source = ws.schema_path
    print(f"{source}: OK")
    print(f"  {len(schema.categories)} categories, {len(schema.preferences)} preferences")
    print(f"  total weight {format_decimal(total_weight(schema))}")
    return 0


def cmd_load(args) -> int:
    ws = Workspace.open(args.workspace)
    state = ws.load_session()
    rel = state.load_dataset(args.csv, time_column=args.time_column, name=args.name)
    ws.save_session(state)
    kinds = ", ".join(f"{c.name}:{c.kind}" for c in rel.columns)
    print(f"loaded relation {rel.name}: {len(rel.rows)} rows ({kinds})")
    return 0


def cmd_set(args) -> int:
    ws = Workspace.open(args.workspace)
    state = ws.load_session()
    level, instance = _parse_scope(args.scope)
    state.set_preference(AssignmentKey(args.pref, level, instance), args.value)
    ws.save_session(state)
    print(f"set {args.pref} @ {args.scope} = {args.value}")
    return 0


def cmd_explore(args) -> int:
    ws = Workspace.open(args.workspace)
    state = ws.load_session()
    if args.action == "add-view":
        attrs = args.attributes.split(",") if args.attributes else None
        state.add_view(args.id, args.relation, args.kind, args.role, attrs)
    elif args.action == "add-filter":
        if args.range is not None:
            state.add_filter(args.id, args.view, args.attribute, lo=args.range[0], hi=args.range[1])
        elif args.values:
            state.add_filter(args.id, args.view, args.attribute, values=args.values.split(","))
        else:
            raise ValidationError("add-filter needs --range LO HI or --values a,b")
    elif args.action == "set-current-node":
        state.mutate_exploration(SetCurrentNode(args.view, args.node))
    elif args.action == "set-attributes":
        state.mutate_exploration(SetAttributes(args.view, tuple(args.attrs.split(","))))
    elif args.action == "set-filter-range":
        state.mutate_exploration(SetFilterRange(args.filter, Decimal(args.lo), Decimal(args.hi)))
    elif args.action == "move-window":
        state.mutate_exploration(MoveWindow(args.view, args.x, args.y, args.width, args.height))
    ws.save_session(state)
    print(f"ok: {args.action}")
    return 0


def cmd_vp_save(args) -> int:
    ws = Workspace.open(args.workspace)
    state = ws.load_session()
    draft = MetaDraft(
        name=args.name,
        description=args.description,
        priority=Priority(args.priority),
        attitude=Attitude(args.attitude),
        area_id=args.area,
        image=args.image,
    )
    vp = viewpoint.capture(state, draft, areas=ws.areas)
    path = _resolve(args.file, ws.viewpoint_dir)
    saved = viewpoint.save_xml(vp, path, ws.schema)
    print(f"saved viewpoint {saved.file_meta.name!r} to {path}")
    return 0


def cmd_vp_show(args) -> int:
    ws = Workspace.open(args.workspace)
    vp = ws.load_viewpoint(_resolve(args.file, ws.viewpoint_dir))
    fm, cm, om = vp.file_meta, vp.content_meta, vp.owner_meta
    print(f"viewpoint {fm.name!r}")
    print(f"  saved-at: {viewpoint.format_timestamp(fm.saved_at)}  path: {fm.path}")
    if fm.image:
        print(f"  image: {fm.image}")
    if cm.area_id:
        print(f"  area: {cm.area_id}")
    if cm.period:
        print(f"  period: {cm.period[0].isoformat()} .. {cm.period[1].isoformat()}")
    if cm.description:
        print(f"  description: {cm.description}")
    print(f"  owner: {om.name}  priority: {om.priority.value}  attitude: {om.attitude.value}")
    print(f"  context: {len(vp.snapshot.relations)} relations, {len(vp.snapshot.views)} views")
    print(f"  {len(vp.snapshot.assignments)} preference assignments")
    return 0


def cmd_vp_edit(args) -> int:
    ws = Workspace.open(args.workspace)
    path = _resolve(args.file, ws.viewpoint_dir)
    vp = ws.load_viewpoint(path)
    changes = {}
    if args.name is not None:
        changes["name"] = args.name
    if args.description is not None:
        changes["description"] = args.description
    if args.priority is not None:
        changes["priority"] = args.priority
    if args.attitude is not None:
        changes["attitude"] = args.attitude
    if args.area is not None:
        changes["area_id"] = args.area or None
    if args.image is not None:
        changes["image"] = args.image or None
    edited = viewpoint.edit_metadata(vp, areas=ws.areas, **changes)
    out = _resolve(args.out, ws.viewpoint_dir) if args.out else path
    viewpoint.save_xml(edited, out, ws.schema)
    print(f"wrote {out}")
    return 0


def cmd_vp_apply(args) -> int:
    ws = Workspace.open(args.workspace)
    path = _resolve(args.file, ws.viewpoint_dir)
    vp = ws.load_viewpoint(path)
    state = ws.load_session()
    viewpoint.apply(vp, state)
    ws.save_session(state)
    print(f"applied viewpoint {vp.file_meta.name!r}")
    for line in _state_lines(state):
        print(line)
    return 0


def cmd_scn(args) -> int:
    ws = Workspace.open(args.workspace)
    path = _resolve(args.file, ws.scenario_dir)
    if args.scn_action == "new":
        sc = scenario.create(args.name)
        scenario.save_xml(sc, path)
        print(f"created scenario {args.name!r} at {path}")
        return 0
    sc = scenario.load_xml(path)
    if args.scn_action == "add":
        position = args.at if args.at is not None else len(sc.steps) + 1
        sc = scenario.insert_step(sc, position, _resolve(args.viewpoint, ws.viewpoint_dir))
        scenario.save_xml(sc, path)
        print(f"added step {position} ({len(sc.steps)} total)")
    elif args.scn_action == "move":
        sc = scenario.move_step(sc, args.frm, args.to)
        scenario.save_xml(sc, path)
        print(f"moved step {args.frm} -> {args.to}")
    elif args.scn_action == "rm":
        sc = scenario.remove_step(sc, args.position)
        scenario.save_xml(sc, path)
        print(f"removed step {args.position} ({len(sc.steps)} left)")
    elif args.scn_action == "preview":
        entries = scenario.preview(sc, areas=ws.areas)
        if not entries:
            print("(empty scenario)")
        for e in entries:
            if e.broken:
                print(f"  {e.order}. BROKEN {e.ref}")
            else:
                print(
                    f"  {e.order}. {e.name}  [{e.priority}/{e.attitude}]"
                    f"  owner {e.owner}  saved {viewpoint.format_timestamp(e.saved_at)}"
                )
    elif args.scn_action == "play":
        state = ws.load_session()
        cursor = scenario.playback(sc, state, areas=ws.areas)
        if args.step is not None:
            vp = cursor.goto(args.step)
            print(f"at step {cursor.position}: {vp.file_meta.name!r}")
        else:
            while cursor.next():
                step = sc.steps[cursor.position - 1]
                print(f"step {cursor.position}: applied {step.ref}")
        ws.save_session(state)
        for line in _state_lines(state):
            print(line)
    return 0


def cmd_diff(args) -> int:
    ws = Workspace.open(args.workspace)
    left = ws.load_viewpoint(_resolve(args.left, ws.viewpoint_dir))
    right = ws.load_viewpoint(_resolve(args.right, ws.viewpoint_dir))
    report = diff_viewpoints(left, right, ws.schema)
    print(f"difference: {float(report.normalized_percent):.1f}%"
          f"  (raw {format_decimal(report.raw_distance)} / max {format_decimal(report.max_distance)})")
    top = top_categories(report, args.top)
    if top:
        print(f"top {len(top)} categories:")
        for name, distance in top:
            print(f"  {name}: {format_decimal(distance)}")
    else:
        print("no differences")
    if args.xml:
        diff_to_xml(report, args.xml)
        print(f"wrote {args.xml}")
    return 0


def cmd_compare(args) -> int:
    ws = Workspace.open(args.workspace)
    paths = [_resolve(f, ws.viewpoint_dir) for f in args.files]
    viewpoints = [ws.load_viewpoint(p) for p in paths]
    matrix = distance_matrix(viewpoints, ws.schema, labels=list(args.files))
    layout = projection.mds_project(matrix)
    metrics = projection.quality(matrix, layout)
    document = projection.export_layout(layout, metrics, args.label)
    print(f"{len(viewpoints)} viewpoints")
    for point in document["points"]:
        print(f"  {point['id']}: ({point['x']:.3f}, {point['y']:.3f})")
    if metrics.mean_ratio is not None:
        print(
            f"quality: mean ratio {metrics.mean_ratio:.6f}, variance {metrics.variance_ratio:.6g},"
            f" excluded pairs {metrics.excluded_pairs}"
        )
    if layout.non_euclidean:
        print("note: distances are not square-embeddable; projection is approximate")
    if args.layout:
        with open(args.layout, "w", encoding="utf-8") as handle:
            json.dump(document, handle, indent=2)
            handle.write("\n")
        print(f"wrote {args.layout}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    ws = Workspace.open(args.workspace)
    app = create_app(ws, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ── Parser ─────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="traceview", description=__doc__)
    parser.add_argument("-w", "--workspace", default=".", help="workspace directory (default: .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a workspace with the default schema")
    p.set_defaults(func=cmd_init)

    p_schema = sub.add_parser("schema", help="schema tools")
    schema_sub = p_schema.add_subparsers(dest="schema_action", required=True)
    p = schema_sub.add_parser("validate", help="validate the active (or given) schema")
    p.add_argument("path", nargs="?", default=None)
    p.set_defaults(func=cmd_schema_validate)

    p = sub.add_parser("load", help="load a CSV dataset into the session")
    p.add_argument("csv")
    p.add_argument("--time-column", default=None)
    p.add_argument("--name", default=None, help="relation name (default: file stem)")
    p.set_defaults(func=cmd_load)

    p = sub.add_parser("set", help="set a preference in the session")
    p.add_argument("pref")
    p.add_argument("scope", help="application | relation:<name> | view:<id>")
    p.add_argument("value")
    p.set_defaults(func=cmd_set)

    p_explore = sub.add_parser("explore", help="interactive exploration actions")
    explore_sub = p_explore.add_subparsers(dest="action", required=True)
    p = explore_sub.add_parser("add-view")
    p.add_argument("id")
    p.add_argument("relation")
    p.add_argument("kind", choices=["table", "pie", "treemap", "temporal"])
    p.add_argument("role", choices=["master", "detail"])
    p.add_argument("--attributes", default=None, help="comma-joined column names")
    p.set_defaults(func=cmd_explore)
    p = explore_sub.add_parser("add-filter")
    p.add_argument("id")
    p.add_argument("view")
    p.add_argument("attribute")
    p.add_argument("--range", nargs=2, metavar=("LO", "HI"), default=None)
    p.add_argument("--values", default=None, help="comma-joined value set")
    p.set_defaults(func=cmd_explore)
    p = explore_sub.add_parser("set-current-node")
    p.add_argument("view")
    p.add_argument("node")
    p.set_defaults(func=cmd_explore)
    p = explore_sub.add_parser("set-attributes")
    p.add_argument("view")
    p.add_argument("attrs", help="comma-joined column names")
    p.set_defaults(func=cmd_explore)
    p = explore_sub.add_parser("set-filter-range")
    p.add_argument("filter")
    p.add_argument("lo")
    p.add_argument("hi")
    p.set_defaults(func=cmd_explore)
    p = explore_sub.add_parser("move-window")
    p.add_argument("view")
    p.add_argument("x", type=int)
    p.add_argument("y", type=int)
    p.add_argument("width", type=int)
    p.add_argument("height", type=int)
    p.set_defaults(func=cmd_explore)

    p_vp = sub.add_parser("vp", help="viewpoint operations")
    vp_sub = p_vp.add_subparsers(dest="vp_action", required=True)
    p = vp_sub.add_parser("save", help="capture the session into a viewpoint file")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--description", default="")
    p.add_argument("--priority", choices=[e.value for e in Priority], default="interesting")
    p.add_argument("--attitude", choices=[e.value for e in Attitude], default="neutral")
    p.add_argument("--area", default=None)
    p.add_argument("--image", default=None)
    p.set_defaults(func=cmd_vp_save)
    p = vp_sub.add_parser("show")
    p.add_argument("file")
    p.set_defaults(func=cmd_vp_show)
    p = vp_sub.add_parser("edit")
    p.add_argument("file")
    p.add_argument("--out", default=None, help="write the edited copy here (default: in place)")
    p.add_argument("--name", default=None)
    p.add_argument("--description", default=None)
    p.add_argument("--priority", choices=[e.value for e in Priority], default=None)
    p.add_argument("--attitude", choices=[e.value for e in Attitude], default=None)
    p.add_argument("--area", default=None, help="area id; empty string clears it")
    p.add_argument("--image", default=None, help="image path; empty string clears it")
    p.set_defaults(func=cmd_vp_edit)
    p = vp_sub.add_parser("apply")
    p.add_argument("file")
    p.set_defaults(func=cmd_vp_apply)

    p_scn = sub.add_parser("scn", help="scenario operations")
    scn_sub = p_scn.add_subparsers(dest="scn_action", required=True)
    p = scn_sub.add_parser("new")
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_scn)
    p = scn_sub.add_parser("add")
    p.add_argument("file")
    p.add_argument("viewpoint")
    p.add_argument("--at", type=int, default=None, help="1-based position (default: append)")
    p.set_defaults(func=cmd_scn)
    p = scn_sub.add_parser("move")
    p.add_argument("file")
    p.add_argument("frm", type=int, metavar="from")
    p.add_argument("to", type=int)
    p.set_defaults(func=cmd_scn)
    p = scn_sub.add_parser("rm")
    p.add_argument("file")
    p.add_argument("position", type=int)
    p.set_defaults(func=cmd_scn)
    p = scn_sub.add_parser("play")
    p.add_argument("file")
    p.add_argument("--step", type=int, default=None, help="go to one step instead of playing all")
    p.set_defaults(func=cmd_scn)
    p = scn_sub.add_parser("preview")
    p.add_argument("file")
    p.set_defaults(func=cmd_scn)

    p = sub.add_parser("diff", help="compare two viewpoint files")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--xml", default=None, help="also write the diff XML here")
    p.add_argument("--top", type=int, default=3)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("compare", help="project n viewpoints to 2D")
    p.add_argument("files", nargs="+")
    p.add_argument("--layout", default=None, help="write the layout JSON here")
    p.add_argument("--label", choices=list(projection.LABEL_MODES), default="computed")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP JSON service")
    p.add_argument("--port", type=int, default=7341)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", default=None, help="static UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StorageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TraceViewError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
