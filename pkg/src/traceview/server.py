"""HTTP JSON service backing the companion UI.

All endpoints are thin adapters over the engine modules — the CLI and
the service share every computation. Artifact ids are percent-encoded
workspace-relative file paths. One exploration session (a single
ApplicationState) lives in the service; scenario playback applies
viewpoints to it behind a lock, as do all file writes.

Errors: 400 validation (machine-readable reason), 404 unknown id,
409 stale write (saved-at precondition mismatch), 500 I/O.
"""
from __future__ import annotations

import os
import re
import threading
from datetime import datetime, timezone

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import projection, scenario
from .diff import DiffReport
from .diff import diff as diff_viewpoints
from .diff import distance_matrix
from .errors import StorageError, TraceViewError, ValidationError
from .schema import lookup
from .viewpoint import Viewpoint, format_timestamp
from .workspace import Workspace


class DiffRequest(BaseModel):
    left: str
    right: str


class LayoutRequest(BaseModel):
    ids: list[str]
    label: str = "computed"


class ScenarioCreate(BaseModel):
    name: str
    refs: list[str] = []


class ScenarioUpdate(BaseModel):
    steps: list[str] | None = None
    name: str | None = None


class GotoRequest(BaseModel):
    step: int


class NotFound(Exception):
    def __init__(self, what: str):
        self.what = what


class StaleWrite(Exception):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _dec(value) -> float:
    """Decimal -> float through the canonical 6-digit spelling, so JSON
    numbers equal what the diff XML serializes."""
    from .schema import format_decimal

    return float(format_decimal(value))


def _file_version(path) -> str:
    stamp = datetime.fromtimestamp(os.path.getmtime(path), tz=timezone.utc)
    return format_timestamp(stamp)


def _slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9-]+", "-", name.lower()).strip("-")
    return slug or "scenario"


def viewpoint_summary(ws: Workspace, path) -> dict:
    entry: dict = {"id": ws.id_for(path)}
    try:
        vp = ws.load_viewpoint(path)
    except (TraceViewError, OSError):
        entry["broken"] = True
        return entry
    area = ws.areas.get(vp.content_meta.area_id) if vp.content_meta.area_id else None
    entry.update(
        {
            "broken": False,
            "name": vp.file_meta.name,
            "savedAt": format_timestamp(vp.file_meta.saved_at),
            "image": vp.file_meta.image,
            "areaId": vp.content_meta.area_id,
            "areaIcon": area.icon if area else None,
            "periodStart": vp.content_meta.period[0].isoformat() if vp.content_meta.period else None,
            "periodEnd": vp.content_meta.period[1].isoformat() if vp.content_meta.period else None,
            "description": vp.content_meta.description,
            "owner": vp.owner_meta.name,
            "priority": vp.owner_meta.priority.value,
            "attitude": vp.owner_meta.attitude.value,
        }
    )
    return entry


def viewpoint_full(ws: Workspace, vp: Viewpoint, vp_id: str) -> dict:
    return {
        "id": vp_id,
        "formatVersion": vp.format_version,
        "meta": {
            "file": {
                "name": vp.file_meta.name,
                "path": vp.file_meta.path,
                "savedAt": format_timestamp(vp.file_meta.saved_at),
                "image": vp.file_meta.image,
            },
            "content": {
                "areaId": vp.content_meta.area_id,
                "periodStart": vp.content_meta.period[0].isoformat() if vp.content_meta.period else None,
                "periodEnd": vp.content_meta.period[1].isoformat() if vp.content_meta.period else None,
                "description": vp.content_meta.description,
            },
            "owner": {
                "name": vp.owner_meta.name,
                "priority": vp.owner_meta.priority.value,
                "attitude": vp.owner_meta.attitude.value,
            },
        },
        "context": {
            "relations": [
                {"name": r.name, "source": r.source, "timeColumn": r.time_column}
                for r in vp.snapshot.relations
            ],
            "views": [
                {"id": v.id, "relation": v.relation, "kind": v.kind, "role": v.role}
                for v in vp.snapshot.views
            ],
        },
        "preferences": [
            {
                "id": a.key.pref_id,
                "scope": a.key.scope.value,
                "instance": a.key.instance,
                "category": lookup(ws.schema, a.key.pref_id).category,
                "kind": a.kind,
                "value": a.value,
            }
            for a in vp.snapshot.assignments
        ],
    }


def diff_report_json(report: DiffReport) -> dict:
    return {
        "leftId": report.left_id,
        "rightId": report.right_id,
        "rawDistance": _dec(report.raw_distance),
        "maxDistance": _dec(report.max_distance),
        "normalizedPercent": _dec(report.normalized_percent),
        "categories": [
            {
                "name": c.category,
                "distance": _dec(c.distance),
                "deltas": [
                    {
                        "prefId": d.key.pref_id,
                        "scope": d.key.scope.value,
                        "instance": d.key.instance,
                        "weight": _dec(d.weight),
                        "left": d.left,
                        "right": d.right,
                    }
                    for d in c.deltas
                ],
            }
            for c in report.categories
        ],
    }


def scenario_json(ws: Workspace, sc: scenario.Scenario, scn_id: str, *, with_preview: bool = True) -> dict:
    payload: dict = {
        "id": scn_id,
        "name": sc.name,
        "savedAt": _file_version(sc.path) if sc.path and os.path.exists(sc.path) else None,
        "steps": [],
    }
    previews = scenario.preview(sc, areas=ws.areas) if with_preview else []
    for idx, step in enumerate(sc.steps):
        resolved = sc.resolved_ref(step)
        entry: dict = {
            "order": step.order,
            "ref": step.ref,
            "viewpointId": ws.id_for(resolved),
        }
        if with_preview:
            p = previews[idx]
            entry["broken"] = p.broken
            if not p.broken:
                entry["meta"] = {
                    "name": p.name,
                    "image": p.image,
                    "areaId": p.area_id,
                    "areaIcon": p.area_icon,
                    "attitude": p.attitude,
                    "priority": p.priority,
                    "owner": p.owner,
                    "savedAt": format_timestamp(p.saved_at),
                    "description": p.description,
                }
        payload["steps"].append(entry)
    return payload


def state_summary(ws: Workspace, state) -> dict:
    return {
        "relations": [
            {
                "name": r.name,
                "source": r.source,
                "timeColumn": r.time_column,
                "rows": len(r.rows),
                "columns": [{"name": c.name, "kind": c.kind} for c in r.columns],
            }
            for r in sorted(state.relations.values(), key=lambda r: r.name)
        ],
        "views": [
            {
                "id": v.id,
                "relation": v.relation,
                "kind": v.kind,
                "role": v.role,
                "currentNode": v.current_node,
                "attributes": list(v.attributes),
                "windowGeometry": list(v.window_geometry),
            }
            for v in sorted(state.views.values(), key=lambda v: v.id)
        ],
        "filters": [
            {"id": f.id, "view": f.view, "attribute": f.attribute, "criterion": str(f.criterion)}
            for f in sorted(state.filters.values(), key=lambda f: f.id)
        ],
        "assignments": len(state.assignments),
    }


def create_app(ws: Workspace, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="traceview", version="0.1.0")
    session_lock = threading.Lock()
    session = ws.load_session()

    def resolve_viewpoint(vp_id: str):
        try:
            path = ws.path_for(vp_id)
        except ValidationError:
            raise NotFound(f"viewpoint {vp_id!r}")
        if not path.is_file():
            raise NotFound(f"viewpoint {vp_id!r}")
        return path

    def resolve_scenario(scn_id: str):
        try:
            path = ws.path_for(scn_id)
        except ValidationError:
            raise NotFound(f"scenario {scn_id!r}")
        if not path.is_file():
            raise NotFound(f"scenario {scn_id!r}")
        return path

    @app.exception_handler(NotFound)
    async def not_found_handler(request: Request, exc: NotFound):
        return _error(404, "not-found", f"unknown {exc.what}")

    @app.exception_handler(StaleWrite)
    async def stale_handler(request: Request, exc: StaleWrite):
        return _error(409, "stale-write", f"expected saved-at {exc.expected!r}, file is at {exc.actual!r}")

    @app.exception_handler(ValidationError)
    async def validation_handler(request: Request, exc: ValidationError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "validation", str(exc.errors()))

    @app.exception_handler(StorageError)
    async def storage_handler(request: Request, exc: StorageError):
        return _error(500, "io", str(exc))

    @app.exception_handler(OSError)
    async def os_error_handler(request: Request, exc: OSError):
        return _error(500, "io", str(exc))

    # ── Viewpoints ─────────────────────────────────────────────────

    @app.get("/viewpoints")
    def list_viewpoints():
        return [viewpoint_summary(ws, path) for path in ws.list_viewpoints()]

    @app.get("/viewpoints/{vp_id:path}")
    def get_viewpoint(vp_id: str):
        path = resolve_viewpoint(vp_id)
        vp = ws.load_viewpoint(path)
        return viewpoint_full(ws, vp, ws.id_for(path))

    # ── Diff and layout ────────────────────────────────────────────

    @app.post("/diff")
    def post_diff(body: DiffRequest):
        left = ws.load_viewpoint(resolve_viewpoint(body.left))
        right = ws.load_viewpoint(resolve_viewpoint(body.right))
        return diff_report_json(diff_viewpoints(left, right, ws.schema))

    @app.post("/layout")
    def post_layout(body: LayoutRequest):
        if not body.ids:
            raise ValidationError("layout needs at least one viewpoint id")
        viewpoints = [ws.load_viewpoint(resolve_viewpoint(vp_id)) for vp_id in body.ids]
        matrix = distance_matrix(viewpoints, ws.schema, labels=list(body.ids))
        layout = projection.mds_project(matrix)
        metrics = projection.quality(matrix, layout)
        return projection.export_layout(layout, metrics, body.label)

    # ── Scenarios ──────────────────────────────────────────────────

    @app.get("/scenarios")
    def list_scenarios():
        entries = []
        for path in ws.list_scenarios():
            try:
                sc = scenario.load_xml(path)
            except (TraceViewError, OSError):
                entries.append({"id": ws.id_for(path), "broken": True})
                continue
            entries.append(
                {
                    "id": ws.id_for(path),
                    "broken": False,
                    "name": sc.name,
                    "savedAt": _file_version(path),
                    "stepCount": len(sc.steps),
                }
            )
        return entries

    @app.get("/scenarios/{scn_id:path}")
    def get_scenario(scn_id: str):
        path = resolve_scenario(scn_id)
        return scenario_json(ws, scenario.load_xml(path), ws.id_for(path))

    @app.post("/scenarios", status_code=201)
    def post_scenario(body: ScenarioCreate):
        refs = [str(resolve_viewpoint(vp_id)) for vp_id in body.refs]
        with session_lock:
            slug = _slugify(body.name)
            path = ws.scenario_dir / f"{slug}.xml"
            counter = 2
            while path.exists():
                path = ws.scenario_dir / f"{slug}-{counter}.xml"
                counter += 1
            sc = scenario.from_refs(body.name, refs)
            saved = scenario.save_xml(sc, path)
        return scenario_json(ws, saved, ws.id_for(path))

    @app.put("/scenarios/{scn_id:path}")
    def put_scenario(scn_id: str, body: ScenarioUpdate, x_saved_at: str | None = Header(default=None)):
        path = resolve_scenario(scn_id)
        with session_lock:
            current = scenario.load_xml(path)
            if x_saved_at is not None:
                actual = _file_version(path)
                if x_saved_at != actual:
                    raise StaleWrite(x_saved_at, actual)
            name = body.name if body.name is not None else current.name
            if body.steps is not None:
                refs = [str(resolve_viewpoint(vp_id)) for vp_id in body.steps]
            else:
                refs = [current.resolved_ref(s) for s in current.steps]
            saved = scenario.save_xml(scenario.from_refs(name, refs), path)
        return scenario_json(ws, saved, ws.id_for(path))

    @app.post("/scenarios/{scn_id:path}/goto")
    def goto_step(scn_id: str, body: GotoRequest):
        path = resolve_scenario(scn_id)
        sc = scenario.load_xml(path)
        with session_lock:
            cursor = scenario.playback(sc, session, areas=ws.areas)
            vp = cursor.goto(body.step)
            ws.save_session(session)
            summary = state_summary(ws, session)
        summary["step"] = body.step
        summary["scenario"] = ws.id_for(path)
        summary["viewpointName"] = vp.file_meta.name
        return summary

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
