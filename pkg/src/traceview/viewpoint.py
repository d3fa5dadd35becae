"""Viewpoints: a complete captured configuration plus its decoration.

A viewpoint bundles the host snapshot with three metadata groups — file
(name, path, save timestamp, optional picture), content (geographic
area, auto-derived time period, free description) and owner (name plus
priority and attitude opinions). It persists as a canonical XML file so
that structurally equal viewpoints with equal save timestamps are
byte-identical on disk.
"""
from __future__ import annotations

import getpass
import os
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from enum import Enum

from .areas import AreaList, default_areas
from .errors import ValidationError
from .hoststate import (
    ApplicationState,
    RelationRef,
    Snapshot,
    SnapshotAssignment,
    ViewRef,
    temporal_bounds,
)
from .schema import AssignmentKey, PreferenceSchema, PrefKind, ScopeLevel, canonical_value, lookup
from .xmlio import Node, check_xml_safe, parse_document, render_document, require_attr, write_atomic

FORMAT_VERSION = 1

USER_ENV = "TRACEVIEW_USER"
CLOCK_ENV = "TRACEVIEW_CLOCK"


class Priority(Enum):
    MUST_SEE = "must-see"
    INTERESTING = "interesting"
    FACULTATIVE = "facultative"


class Attitude(Enum):
    GOOD_NEWS = "good-news"
    NEUTRAL = "neutral"
    BAD_NEWS = "bad-news"


def _parse_enum(enum_cls, token: str, what: str):
    try:
        return enum_cls(token)
    except ValueError:
        allowed = "|".join(e.value for e in enum_cls)
        raise ValidationError(f"{what} must be one of {allowed}, got {token!r}") from None


@dataclass(frozen=True)
class FileMeta:
    name: str
    path: str
    saved_at: datetime  # UTC, second precision
    image: str | None = None


@dataclass(frozen=True)
class ContentMeta:
    area_id: str | None = None
    period: tuple[date, date] | None = None
    description: str = ""


@dataclass(frozen=True)
class OwnerMeta:
    name: str
    priority: Priority
    attitude: Attitude


@dataclass(frozen=True)
class MetaDraft:
    """User-supplied part of the metadata; the rest is auto-derived."""

    name: str
    description: str = ""
    priority: Priority = Priority.INTERESTING
    attitude: Attitude = Attitude.NEUTRAL
    area_id: str | None = None
    image: str | None = None


@dataclass(frozen=True)
class Viewpoint:
    format_version: int
    file_meta: FileMeta
    content_meta: ContentMeta
    owner_meta: OwnerMeta
    snapshot: Snapshot

    @property
    def name(self) -> str:
        return self.file_meta.name

    @property
    def assignments(self) -> dict[AssignmentKey, str]:
        return self.snapshot.assignment_map


# ── Clock and identity resolution ──────────────────────────────────────


def parse_timestamp(text: str) -> datetime:
    try:
        stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise ValidationError(f"bad timestamp: {text!r}") from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(stamp: datetime) -> str:
    return stamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def resolve_clock(clock: datetime | str | None = None) -> datetime:
    """Current save time: explicit value, else TRACEVIEW_CLOCK, else now."""
    if isinstance(clock, datetime):
        return clock.astimezone(timezone.utc).replace(microsecond=0)
    if isinstance(clock, str):
        return parse_timestamp(clock)
    pinned = os.environ.get(CLOCK_ENV)
    if pinned:
        return parse_timestamp(pinned)
    return datetime.now(timezone.utc).replace(microsecond=0)


def resolve_owner(owner: str | None = None) -> str:
    if owner:
        return owner
    env = os.environ.get(USER_ENV)
    if env:
        return env
    try:
        return getpass.getuser() or "unknown"
    except OSError:
        return "unknown"


# ── Capture ────────────────────────────────────────────────────────────


def derive_period(state: ApplicationState) -> tuple[date, date] | None:
    """Min/max span over the time columns of the loaded relations."""
    starts: list[date] = []
    ends: list[date] = []
    for relation in state.relations.values():
        if relation.time_column is None:
            continue
        idx = relation.column_names().index(relation.time_column)
        for row in relation.rows:
            cell = row[idx]
            if cell == "":
                continue
            lo, hi = temporal_bounds(cell)
            starts.append(lo)
            ends.append(hi)
    if not starts:
        return None
    return min(starts), max(ends)


def capture(
    state: ApplicationState,
    draft: MetaDraft,
    *,
    areas: AreaList | None = None,
    owner: str | None = None,
    clock: datetime | str | None = None,
) -> Viewpoint:
    """Freeze the current state into a viewpoint with decorated metadata."""
    if not draft.name:
        raise ValidationError("viewpoint name must be non-empty")
    check_xml_safe(draft.name, "viewpoint name")
    check_xml_safe(draft.description, "description")
    area_list = areas if areas is not None else default_areas()
    if draft.area_id is not None:
        area_list.require(draft.area_id)
    owner_name = resolve_owner(owner)
    check_xml_safe(owner_name, "owner name")
    return Viewpoint(
        format_version=FORMAT_VERSION,
        file_meta=FileMeta(name=draft.name, path="", saved_at=resolve_clock(clock), image=draft.image),
        content_meta=ContentMeta(
            area_id=draft.area_id,
            period=derive_period(state),
            description=draft.description,
        ),
        owner_meta=OwnerMeta(name=owner_name, priority=draft.priority, attitude=draft.attitude),
        snapshot=state.snapshot(),
    )


def edit_metadata(vp: Viewpoint, *, areas: AreaList | None = None, **changes) -> Viewpoint:
    """Return a copy with changed metadata; assignments stay untouched."""
    allowed = {"name", "path", "image", "area_id", "period", "description", "owner", "priority", "attitude"}
    unknown = set(changes) - allowed
    if unknown:
        raise ValidationError(f"not a metadata field: {sorted(unknown)}")
    fm, cm, om = vp.file_meta, vp.content_meta, vp.owner_meta
    if "name" in changes:
        if not changes["name"]:
            raise ValidationError("viewpoint name must be non-empty")
        fm = replace(fm, name=check_xml_safe(changes["name"], "viewpoint name"))
    if "path" in changes:
        fm = replace(fm, path=changes["path"])
    if "image" in changes:
        fm = replace(fm, image=changes["image"])
    if "area_id" in changes:
        area_id = changes["area_id"]
        if area_id is not None:
            (areas if areas is not None else default_areas()).require(area_id)
        cm = replace(cm, area_id=area_id)
    if "period" in changes:
        period = changes["period"]
        if period is not None and period[0] > period[1]:
            raise ValidationError("period start must be <= end")
        cm = replace(cm, period=period)
    if "description" in changes:
        cm = replace(cm, description=check_xml_safe(changes["description"], "description"))
    if "owner" in changes:
        if not changes["owner"]:
            raise ValidationError("owner name must be non-empty")
        om = replace(om, name=check_xml_safe(changes["owner"], "owner name"))
    if "priority" in changes:
        value = changes["priority"]
        om = replace(om, priority=value if isinstance(value, Priority) else _parse_enum(Priority, value, "priority"))
    if "attitude" in changes:
        value = changes["attitude"]
        om = replace(om, attitude=value if isinstance(value, Attitude) else _parse_enum(Attitude, value, "attitude"))
    return replace(vp, file_meta=fm, content_meta=cm, owner_meta=om)


def apply(vp: Viewpoint, state: ApplicationState) -> None:
    """Bring *state* into the viewpoint's configuration."""
    state.restore(vp.snapshot)


# ── Canonical XML ──────────────────────────────────────────────────────


def to_xml(vp: Viewpoint, schema: PreferenceSchema) -> str:
    """Canonical serialization; categories come from the active schema."""
    root = Node("viewpoint", [("format-version", str(vp.format_version))])
    meta = Node("meta")
    fm = vp.file_meta
    meta.child(
        Node("file")
        .attr("name", fm.name)
        .attr("path", fm.path)
        .attr("saved-at", format_timestamp(fm.saved_at))
        .attr("image", fm.image)
    )
    cm = vp.content_meta
    content = Node("content").attr("area-id", cm.area_id)
    if cm.period is not None:
        content.attr("period-start", cm.period[0].isoformat())
        content.attr("period-end", cm.period[1].isoformat())
    content.text = cm.description or None
    meta.child(content)
    om = vp.owner_meta
    meta.child(
        Node("owner")
        .attr("name", om.name)
        .attr("priority", om.priority.value)
        .attr("attitude", om.attitude.value)
    )
    root.child(meta)
    context = Node("context")
    for rel in sorted(vp.snapshot.relations, key=lambda r: r.name):
        context.child(
            Node("relation").attr("name", rel.name).attr("source", rel.source).attr("time-column", rel.time_column)
        )
    for view in sorted(vp.snapshot.views, key=lambda v: v.id):
        context.child(
            Node("view").attr("id", view.id).attr("relation", view.relation).attr("kind", view.kind).attr("role", view.role)
        )
    root.child(context)
    prefs = Node("preferences")
    for sa in sorted(vp.snapshot.assignments, key=lambda a: a.key.sort_key()):
        category = lookup(schema, sa.key.pref_id).category
        node = (
            Node("preference")
            .attr("id", sa.key.pref_id)
            .attr("scope", sa.key.scope.value)
            .attr("instance", sa.key.instance)
            .attr("category", category)
            .attr("kind", sa.kind)
        )
        node.text = sa.value or None
        prefs.child(node)
    root.child(prefs)
    return render_document(root)


def save_xml(
    vp: Viewpoint,
    path,
    schema: PreferenceSchema,
    *,
    clock: datetime | str | None = None,
) -> Viewpoint:
    """Atomically write the canonical XML; returns the saved viewpoint.

    The returned value carries the refreshed save timestamp and path, so
    it deep-equals what load_xml reads back.
    """
    path_text = os.fspath(path)
    saved = replace(vp, file_meta=replace(vp.file_meta, path=path_text, saved_at=resolve_clock(clock)))
    write_atomic(path_text, to_xml(saved, schema))
    return saved


def _validate_snapshot(snap: Snapshot, schema: PreferenceSchema, where: str) -> None:
    relation_names = set()
    for rel in snap.relations:
        if rel.name in relation_names:
            raise ValidationError(f"{where}: duplicate relation {rel.name!r}")
        relation_names.add(rel.name)
    view_ids = set()
    for view in snap.views:
        if view.id in view_ids:
            raise ValidationError(f"{where}: duplicate view {view.id!r}")
        view_ids.add(view.id)
        if view.relation not in relation_names:
            raise ValidationError(f"{where}: view {view.id!r} references unknown relation {view.relation!r}")
    seen_keys = set()
    for sa in snap.assignments:
        definition = lookup(schema, sa.key.pref_id)
        if sa.key in seen_keys:
            raise ValidationError(f"{where}: duplicate assignment {sa.key}")
        seen_keys.add(sa.key)
        if sa.key.scope not in definition.scopes:
            raise ValidationError(
                f"{where}: preference {sa.key.pref_id!r} is not applicable at {sa.key.scope.value} scope"
            )
        if definition.kind.spell() != sa.kind:
            raise ValidationError(
                f"{where}: assignment {sa.key.pref_id!r} kind {sa.kind!r} does not match schema"
            )
        if sa.key.scope is ScopeLevel.RELATION and sa.key.instance not in relation_names:
            raise ValidationError(f"{where}: assignment references unknown relation {sa.key.instance!r}")
        if sa.key.scope is ScopeLevel.VIEW and sa.key.instance not in view_ids:
            raise ValidationError(f"{where}: assignment references unknown view {sa.key.instance!r}")
        canonical_value(definition.kind, sa.value)


def load_xml(path, schema: PreferenceSchema, *, areas: AreaList | None = None) -> Viewpoint:
    """Parse and validate a viewpoint file against the active schema."""
    if not os.path.exists(os.fspath(path)):
        raise FileNotFoundError(f"no such viewpoint file: {os.fspath(path)}")
    root = parse_document(path)
    where = os.fspath(path)
    if root.tag != "viewpoint":
        raise ValidationError(f"{where}: expected <viewpoint>, found <{root.tag}>")
    version = require_attr(root, "format-version", where)
    if version != str(FORMAT_VERSION):
        raise ValidationError(f"{where}: unknown format-version {version!r}")

    meta = root.find("meta")
    if meta is None:
        raise ValidationError(f"{where}: missing <meta>")
    file_elem, content_elem, owner_elem = meta.find("file"), meta.find("content"), meta.find("owner")
    if file_elem is None or content_elem is None or owner_elem is None:
        raise ValidationError(f"{where}: <meta> needs <file>, <content> and <owner>")
    name = require_attr(file_elem, "name", f"{where} <file>")
    if not name:
        raise ValidationError(f"{where}: viewpoint name must be non-empty")
    file_meta = FileMeta(
        name=name,
        path=require_attr(file_elem, "path", f"{where} <file>"),
        saved_at=parse_timestamp(require_attr(file_elem, "saved-at", f"{where} <file>")),
        image=file_elem.get("image"),
    )
    period = None
    period_start, period_end = content_elem.get("period-start"), content_elem.get("period-end")
    if (period_start is None) != (period_end is None):
        raise ValidationError(f"{where}: period-start and period-end must come together")
    if period_start is not None:
        try:
            period = (date.fromisoformat(period_start), date.fromisoformat(period_end))
        except ValueError:
            raise ValidationError(f"{where}: bad period dates") from None
        if period[0] > period[1]:
            raise ValidationError(f"{where}: period start must be <= end")
    area_id = content_elem.get("area-id")
    if area_id is not None:
        area_list = areas if areas is not None else default_areas()
        area_list.require(area_id)
    content_meta = ContentMeta(area_id=area_id, period=period, description=content_elem.text or "")
    owner_name = require_attr(owner_elem, "name", f"{where} <owner>")
    if not owner_name:
        raise ValidationError(f"{where}: owner name must be non-empty")
    owner_meta = OwnerMeta(
        name=owner_name,
        priority=_parse_enum(Priority, require_attr(owner_elem, "priority", f"{where} <owner>"), "priority"),
        attitude=_parse_enum(Attitude, require_attr(owner_elem, "attitude", f"{where} <owner>"), "attitude"),
    )

    context = root.find("context")
    relations = []
    views = []
    if context is not None:
        for elem in context:
            if elem.tag == "relation":
                relations.append(
                    RelationRef(
                        name=require_attr(elem, "name", f"{where} <relation>"),
                        source=require_attr(elem, "source", f"{where} <relation>"),
                        time_column=elem.get("time-column"),
                    )
                )
            elif elem.tag == "view":
                views.append(
                    ViewRef(
                        id=require_attr(elem, "id", f"{where} <view>"),
                        relation=require_attr(elem, "relation", f"{where} <view>"),
                        kind=require_attr(elem, "kind", f"{where} <view>"),
                        role=require_attr(elem, "role", f"{where} <view>"),
                    )
                )
            else:
                raise ValidationError(f"{where}: unexpected element <{elem.tag}> in context")

    prefs_elem = root.find("preferences")
    assignments = []
    if prefs_elem is not None:
        for elem in prefs_elem:
            if elem.tag != "preference":
                raise ValidationError(f"{where}: unexpected element <{elem.tag}> in preferences")
            pref_id = require_attr(elem, "id", f"{where} <preference>")
            scope = ScopeLevel.parse(require_attr(elem, "scope", f"{where} <preference>"))
            instance = elem.get("instance", "")
            kind_text = require_attr(elem, "kind", f"{where} <preference>")
            PrefKind.parse(kind_text)
            assignments.append(
                SnapshotAssignment(
                    key=AssignmentKey(pref_id, scope, instance),
                    kind=kind_text,
                    value=elem.text or "",
                )
            )

    snap = Snapshot(
        relations=tuple(sorted(relations, key=lambda r: r.name)),
        views=tuple(sorted(views, key=lambda v: v.id)),
        assignments=tuple(sorted(assignments, key=lambda a: a.key.sort_key())),
    )
    _validate_snapshot(snap, schema, where)
    return Viewpoint(
        format_version=int(version),
        file_meta=file_meta,
        content_meta=content_meta,
        owner_meta=owner_meta,
        snapshot=snap,
    )
