"""In-memory mock of the visualization host.

Holds loaded relations (tabular datasets), the views displaying them,
active filters, and the complete preference-assignment map. There is no
rendering: the model exists so that the full configuration can be
captured into a snapshot and a snapshot can bring another instance back
into the same configuration.

Implicit, interaction-derived settings (current node, displayed
attributes, filter limits, window geometry) are mirrored into the
assignment map on every mutation, so a snapshot is always just the
assignment map plus the structural context needed to rebuild it.
"""
from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from functools import cached_property
from urllib.parse import quote, unquote

from .errors import MissingDatasetError, ValidationError
from .schema import (
    AssignmentKey,
    PreferenceDefinition,
    PreferenceSchema,
    ScopeLevel,
    canonical_value,
    format_decimal,
    lookup,
)

COLUMN_KINDS = ("numeric", "text", "temporal")
VIEW_KINDS = ("table", "pie", "treemap", "temporal")
VIEW_ROLES = ("master", "detail")

# Assignments whose value mirrors a piece of host structure.
_STRUCTURAL_VIEW_PREFS = (
    "view.current-node",
    "view.attributes",
    "view.window-geometry",
    "view.kind",
    "filter.criteria",
)
_DERIVED_RELATION_PREFS = ("relation.source", "relation.time-column")

_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_YEAR_RE = re.compile(r"^\d{4}$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str


@dataclass(frozen=True)
class Relation:
    name: str
    source: str
    columns: tuple[Column, ...]
    rows: tuple[tuple[str, ...], ...]
    time_column: str | None = None

    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)


@dataclass
class View:
    id: str
    relation: str
    kind: str
    role: str
    attributes: tuple[str, ...]
    current_node: str = "root"
    window_geometry: tuple[int, int, int, int] = (0, 0, 800, 600)


@dataclass(frozen=True)
class RangeCriterion:
    lo: Decimal
    hi: Decimal


@dataclass(frozen=True)
class SetCriterion:
    values: tuple[str, ...]  # sorted


@dataclass
class Filter:
    id: str
    view: str
    attribute: str
    criterion: RangeCriterion | SetCriterion


# ── Exploration actions ────────────────────────────────────────────────


@dataclass(frozen=True)
class SetCurrentNode:
    view: str
    node: str


@dataclass(frozen=True)
class SetAttributes:
    view: str
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class SetFilterRange:
    filter: str
    lo: Decimal
    hi: Decimal


@dataclass(frozen=True)
class MoveWindow:
    view: str
    x: int
    y: int
    width: int
    height: int


ExplorationAction = SetCurrentNode | SetAttributes | SetFilterRange | MoveWindow


# ── Snapshot (the payload a viewpoint embeds) ──────────────────────────


@dataclass(frozen=True)
class RelationRef:
    name: str
    source: str
    time_column: str | None


@dataclass(frozen=True)
class ViewRef:
    id: str
    relation: str
    kind: str
    role: str


@dataclass(frozen=True)
class SnapshotAssignment:
    key: AssignmentKey
    kind: str  # spelled kind, e.g. "integer" or "enum(a,b)"
    value: str


@dataclass(frozen=True)
class Snapshot:
    """Complete assignment set plus the context needed to restore it."""

    relations: tuple[RelationRef, ...]
    views: tuple[ViewRef, ...]
    assignments: tuple[SnapshotAssignment, ...]

    @cached_property
    def assignment_map(self) -> dict[AssignmentKey, str]:
        return {a.key: a.value for a in self.assignments}


# ── Column-kind inference and temporal helpers ─────────────────────────


def is_decimal_text(value: str) -> bool:
    return bool(_DECIMAL_RE.match(value))


def is_temporal_text(value: str) -> bool:
    if _YEAR_RE.match(value):
        return True
    if _DATE_RE.match(value):
        try:
            date.fromisoformat(value)
            return True
        except ValueError:
            return False
    return False


def temporal_bounds(value: str) -> tuple[date, date]:
    """Date span covered by one temporal cell: a year spans Jan 1–Dec 31."""
    if _YEAR_RE.match(value):
        year = int(value)
        return date(year, 1, 1), date(year, 12, 31)
    d = date.fromisoformat(value)
    return d, d


def infer_column_kind(values: list[str], *, prefer_temporal: bool = False) -> str:
    non_empty = [v for v in values if v != ""]
    if not non_empty:
        return "text"
    if prefer_temporal and all(is_temporal_text(v) for v in non_empty):
        return "temporal"
    if all(is_decimal_text(v) for v in non_empty):
        return "numeric"
    if all(is_temporal_text(v) for v in non_empty):
        return "temporal"
    return "text"


# ── Filter-criteria value encoding ─────────────────────────────────────
# One view-scoped assignment mirrors all of the view's filters, so the
# value has to be a single canonical string. Components are URL-quoted
# to keep the separators unambiguous; filters sort by id.


def encode_filters(filters: list[Filter]) -> str:
    parts = []
    for f in sorted(filters, key=lambda f: f.id):
        head = f"{quote(f.id, safe='')}:{quote(f.attribute, safe='')}"
        if isinstance(f.criterion, RangeCriterion):
            parts.append(f"{head}:range:{format_decimal(f.criterion.lo)}:{format_decimal(f.criterion.hi)}")
        else:
            values = "|".join(quote(v, safe="") for v in f.criterion.values)
            parts.append(f"{head}:set:{values}")
    return ";".join(parts)


def decode_filters(view_id: str, encoded: str) -> list[Filter]:
    if not encoded:
        return []
    filters = []
    for part in encoded.split(";"):
        pieces = part.split(":")
        if len(pieces) < 4:
            raise ValidationError(f"bad filter encoding: {part!r}")
        fid, attribute, crit_kind = unquote(pieces[0]), unquote(pieces[1]), pieces[2]
        if crit_kind == "range" and len(pieces) == 5:
            try:
                lo, hi = Decimal(pieces[3]), Decimal(pieces[4])
            except InvalidOperation:
                raise ValidationError(f"bad filter range: {part!r}") from None
            criterion: RangeCriterion | SetCriterion = RangeCriterion(lo, hi)
        elif crit_kind == "set" and len(pieces) == 4:
            values = tuple(sorted(unquote(v) for v in pieces[3].split("|") if v))
            if not values:
                raise ValidationError(f"empty filter value set: {part!r}")
            criterion = SetCriterion(values)
        else:
            raise ValidationError(f"bad filter encoding: {part!r}")
        filters.append(Filter(fid, view_id, attribute, criterion))
    return filters


class ApplicationState:
    """One live host session. Single writer; snapshots are immutable."""

    def __init__(self, schema: PreferenceSchema):
        self.schema = schema
        self.relations: dict[str, Relation] = {}
        self.views: dict[str, View] = {}
        self.filters: dict[str, Filter] = {}
        self.assignments: dict[AssignmentKey, str] = {}
        for definition in schema.preferences:
            if ScopeLevel.APPLICATION in definition.scopes:
                self.assignments[AssignmentKey(definition.id, ScopeLevel.APPLICATION)] = definition.default

    def __eq__(self, other) -> bool:
        if not isinstance(other, ApplicationState):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.relations == other.relations
            and self.views == other.views
            and self.filters == other.filters
            and self.assignments == other.assignments
        )

    # ── Dataset ingestion ──────────────────────────────────────────

    def load_dataset(self, csv_path, time_column: str | None = None, name: str | None = None) -> Relation:
        """Load a CSV (first row = header) and register it as a relation.

        Column kinds are inferred per column; a column designated as the
        time column must parse as temporal (ISO dates or bare years).
        """
        source = os.fspath(csv_path)
        relation_name = name if name is not None else os.path.splitext(os.path.basename(source))[0]
        if relation_name in self.relations:
            raise ValidationError(f"duplicate relation name: {relation_name!r}")
        with open(source, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if not header:
                raise ValidationError(f"{source}: no header")
            rows = []
            for line_no, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    raise ValidationError(f"{source}: ragged row at line {line_no}")
                rows.append(tuple(row))
        seen = set()
        for col in header:
            if col in seen:
                raise ValidationError(f"{source}: duplicate column {col!r}")
            if "," in col:
                raise ValidationError(f"{source}: column name must not contain a comma: {col!r}")
            seen.add(col)
        if time_column is not None and time_column not in header:
            raise ValidationError(f"{source}: unknown time column {time_column!r}")
        columns = []
        for idx, col in enumerate(header):
            values = [row[idx] for row in rows]
            kind = infer_column_kind(values, prefer_temporal=(col == time_column))
            if col == time_column and kind != "temporal":
                raise ValidationError(f"{source}: time column {col!r} does not parse as temporal")
            columns.append(Column(col, kind))
        relation = Relation(relation_name, source, tuple(columns), tuple(rows), time_column)
        self.relations[relation_name] = relation
        for definition in self.schema.preferences:
            if ScopeLevel.RELATION in definition.scopes:
                key = AssignmentKey(definition.id, ScopeLevel.RELATION, relation_name)
                if definition.id == "relation.source":
                    self.assignments[key] = canonical_value(definition.kind, source)
                elif definition.id == "relation.time-column":
                    self.assignments[key] = canonical_value(definition.kind, time_column or "")
                else:
                    self.assignments[key] = definition.default
        return relation

    # ── Structure creation ─────────────────────────────────────────

    def add_view(
        self,
        view_id: str,
        relation: str,
        kind: str,
        role: str,
        attributes: tuple[str, ...] | list[str] | None = None,
    ) -> View:
        """Open a view on a relation; defaults to showing every column."""
        if view_id in self.views:
            raise ValidationError(f"duplicate view id: {view_id!r}")
        if not view_id:
            raise ValidationError("view id must be non-empty")
        rel = self.relations.get(relation)
        if rel is None:
            raise ValidationError(f"unknown relation: {relation!r}")
        if kind not in VIEW_KINDS:
            raise ValidationError(f"unknown view kind: {kind!r}")
        if role not in VIEW_ROLES:
            raise ValidationError(f"unknown view role: {role!r}")
        attrs = tuple(attributes) if attributes is not None else rel.column_names()
        self._check_attributes(rel, attrs)
        view = View(view_id, relation, kind, role, attrs)
        self.views[view_id] = view
        for definition in self.schema.preferences:
            if ScopeLevel.VIEW in definition.scopes:
                key = AssignmentKey(definition.id, ScopeLevel.VIEW, view_id)
                if definition.id == "view.kind":
                    self.assignments[key] = canonical_value(definition.kind, kind)
                elif definition.id == "view.attributes":
                    self.assignments[key] = canonical_value(definition.kind, attrs)
                elif definition.id == "view.current-node":
                    self.assignments[key] = "root"
                elif definition.id == "view.window-geometry":
                    self.assignments[key] = "0,0,800,600"
                else:
                    self.assignments[key] = definition.default
        return view

    def add_filter(
        self,
        filter_id: str,
        view_id: str,
        attribute: str,
        lo: Decimal | int | float | str | None = None,
        hi: Decimal | int | float | str | None = None,
        values: tuple[str, ...] | list[str] | None = None,
    ) -> Filter:
        """Attach a highlight filter to a view (range or value set)."""
        if filter_id in self.filters:
            raise ValidationError(f"duplicate filter id: {filter_id!r}")
        view = self._require_view(view_id)
        if values is not None:
            if lo is not None or hi is not None:
                raise ValidationError("filter takes a range or a value set, not both")
            criterion: RangeCriterion | SetCriterion = SetCriterion(tuple(sorted(values)))
        elif lo is not None and hi is not None:
            criterion = RangeCriterion(self._as_decimal(lo), self._as_decimal(hi))
        else:
            raise ValidationError("filter needs lo+hi or a value set")
        candidate = Filter(filter_id, view_id, attribute, criterion)
        remaining = [f for f in self.filters.values() if f.view == view_id]
        encoded = encode_filters(remaining + [candidate])
        self._assign(AssignmentKey("filter.criteria", ScopeLevel.VIEW, view.id), encoded)
        return self.filters[filter_id]

    # ── Preference assignment ──────────────────────────────────────

    def set_preference(self, key: AssignmentKey, value) -> None:
        """Explicitly assign one preference; idempotent for equal values."""
        definition = lookup(self.schema, key.pref_id)
        if key.pref_id in _DERIVED_RELATION_PREFS:
            raise ValidationError(f"{key.pref_id} is derived from the loaded dataset; read-only")
        canonical = canonical_value(definition.kind, value)
        self._assign(key, canonical, definition)

    def mutate_exploration(self, action: ExplorationAction) -> None:
        """Apply one interactive exploration step.

        Host structure and the mirrored implicit assignment are updated
        together; validation happens before any mutation.
        """
        if isinstance(action, SetCurrentNode):
            view = self._require_view(action.view)
            definition = lookup(self.schema, "view.current-node")
            canonical = canonical_value(definition.kind, action.node)
            targets = [view]
            if view.role == "master":
                targets += [
                    v
                    for v in self.views.values()
                    if v.relation == view.relation and v.role == "detail" and v.id != view.id
                ]
            for target in targets:
                self._assign(AssignmentKey("view.current-node", ScopeLevel.VIEW, target.id), canonical, definition)
        elif isinstance(action, SetAttributes):
            view = self._require_view(action.view)
            definition = lookup(self.schema, "view.attributes")
            canonical = canonical_value(definition.kind, tuple(action.attributes))
            self._assign(AssignmentKey("view.attributes", ScopeLevel.VIEW, view.id), canonical, definition)
        elif isinstance(action, SetFilterRange):
            existing = self.filters.get(action.filter)
            if existing is None:
                raise ValidationError(f"unknown filter: {action.filter!r}")
            lo, hi = self._as_decimal(action.lo), self._as_decimal(action.hi)
            updated = Filter(existing.id, existing.view, existing.attribute, RangeCriterion(lo, hi))
            others = [f for f in self.filters.values() if f.view == existing.view and f.id != existing.id]
            encoded = encode_filters(others + [updated])
            self._assign(AssignmentKey("filter.criteria", ScopeLevel.VIEW, existing.view), encoded)
        elif isinstance(action, MoveWindow):
            view = self._require_view(action.view)
            for label, v in (("x", action.x), ("y", action.y), ("width", action.width), ("height", action.height)):
                if not isinstance(v, int) or isinstance(v, bool):
                    raise ValidationError(f"window {label} must be an integer")
            geometry = f"{action.x},{action.y},{action.width},{action.height}"
            self._assign(AssignmentKey("view.window-geometry", ScopeLevel.VIEW, view.id), geometry)
        else:
            raise ValidationError(f"unknown exploration action: {action!r}")

    # ── Snapshot / restore ─────────────────────────────────────────

    def snapshot(self) -> Snapshot:
        """Capture every assignment plus restore context; pure read."""
        relations = tuple(
            RelationRef(r.name, r.source, r.time_column)
            for r in sorted(self.relations.values(), key=lambda r: r.name)
        )
        views = tuple(
            ViewRef(v.id, v.relation, v.kind, v.role)
            for v in sorted(self.views.values(), key=lambda v: v.id)
        )
        assignments = tuple(
            SnapshotAssignment(key, lookup(self.schema, key.pref_id).kind.spell(), value)
            for key, value in sorted(self.assignments.items(), key=lambda kv: kv[0].sort_key())
        )
        return Snapshot(relations, views, assignments)

    def restore(self, snap: Snapshot) -> None:
        """Rebuild this state to deep-equal the snapshot's origin.

        Datasets are re-loaded from their recorded sources; assignments
        overlay the freshly created defaults. Nothing is mutated if
        validation fails partway: work happens on a staging instance.
        """
        staging = ApplicationState(self.schema)
        for ref in snap.relations:
            try:
                staging.load_dataset(ref.source, time_column=ref.time_column, name=ref.name)
            except OSError as exc:
                raise MissingDatasetError(ref.source, str(exc)) from exc
        known_relations = {ref.name for ref in snap.relations}
        for vref in snap.views:
            if vref.relation not in known_relations:
                raise ValidationError(f"view {vref.id!r} references unknown relation {vref.relation!r}")
            staging.add_view(vref.id, vref.relation, vref.kind, vref.role)
        for sa in sorted(snap.assignments, key=lambda s: s.key.sort_key()):
            definition = lookup(self.schema, sa.key.pref_id)
            if definition.kind.spell() != sa.kind:
                raise ValidationError(
                    f"assignment {sa.key.pref_id!r}: kind {sa.kind!r} does not match schema "
                    f"kind {definition.kind.spell()!r}"
                )
            canonical = canonical_value(definition.kind, sa.value)
            staging._assign(sa.key, canonical, definition)
        self.relations = staging.relations
        self.views = staging.views
        self.filters = staging.filters
        self.assignments = staging.assignments

    # ── Internals ──────────────────────────────────────────────────

    @staticmethod
    def _as_decimal(value) -> Decimal:
        try:
            return Decimal(str(value))
        except InvalidOperation:
            raise ValidationError(f"expected a number, got {value!r}") from None

    def _require_view(self, view_id: str) -> View:
        view = self.views.get(view_id)
        if view is None:
            raise ValidationError(f"unknown view: {view_id!r}")
        return view

    def _check_attributes(self, relation: Relation, attrs: tuple[str, ...]) -> None:
        names = set(relation.column_names())
        seen = set()
        for attr in attrs:
            if attr not in names:
                raise ValidationError(f"unknown column {attr!r} in relation {relation.name!r}")
            if attr in seen:
                raise ValidationError(f"duplicate attribute {attr!r}")
            seen.add(attr)

    def _check_node(self, relation: Relation, node: str) -> None:
        if node == "root":
            return
        try:
            index = int(node)
        except ValueError:
            raise ValidationError(f"current node must be 'root' or a row index, got {node!r}") from None
        if not 0 <= index < len(relation.rows):
            raise ValidationError(f"row index {index} out of range for relation {relation.name!r}")

    def _assign(self, key: AssignmentKey, canonical: str, definition: PreferenceDefinition | None = None) -> None:
        """Validate and commit one canonical assignment, syncing structure."""
        if definition is None:
            definition = lookup(self.schema, key.pref_id)
        if key.scope not in definition.scopes:
            raise ValidationError(f"preference {key.pref_id!r} is not applicable at {key.scope.value} scope")
        if key.scope is ScopeLevel.RELATION and key.instance not in self.relations:
            raise ValidationError(f"unknown relation instance: {key.instance!r}")
        if key.scope is ScopeLevel.VIEW and key.instance not in self.views:
            raise ValidationError(f"unknown view instance: {key.instance!r}")
        self._sync_structure(key, canonical)
        self.assignments[key] = canonical

    def _sync_structure(self, key: AssignmentKey, canonical: str) -> None:
        if key.scope is ScopeLevel.RELATION and key.pref_id in _DERIVED_RELATION_PREFS:
            relation = self.relations[key.instance]
            actual = relation.source if key.pref_id == "relation.source" else (relation.time_column or "")
            if canonical != actual:
                raise ValidationError(
                    f"{key.pref_id} assignment {canonical!r} disagrees with loaded dataset {actual!r}"
                )
            return
        if key.scope is not ScopeLevel.VIEW or key.pref_id not in _STRUCTURAL_VIEW_PREFS:
            return
        view = self.views[key.instance]
        relation = self.relations[view.relation]
        if key.pref_id == "view.current-node":
            self._check_node(relation, canonical)
            view.current_node = canonical
        elif key.pref_id == "view.attributes":
            attrs = tuple(a for a in canonical.split(",") if a) if canonical else ()
            self._check_attributes(relation, attrs)
            view.attributes = attrs
        elif key.pref_id == "view.window-geometry":
            parts = canonical.split(",")
            try:
                x, y, w, h = (int(p) for p in parts)
            except ValueError:
                raise ValidationError(f"window geometry must be 'x,y,w,h' integers, got {canonical!r}") from None
            view.window_geometry = (x, y, w, h)
        elif key.pref_id == "view.kind":
            view.kind = canonical
        elif key.pref_id == "filter.criteria":
            decoded = decode_filters(view.id, canonical)
            seen = set()
            for f in decoded:
                if f.id in seen:
                    raise ValidationError(f"duplicate filter id {f.id!r} in criteria")
                seen.add(f.id)
                other = self.filters.get(f.id)
                if other is not None and other.view != view.id:
                    raise ValidationError(f"filter id {f.id!r} already used by view {other.view!r}")
                if f.attribute not in relation.column_names():
                    raise ValidationError(
                        f"filter {f.id!r}: unknown column {f.attribute!r} in relation {relation.name!r}"
                    )
                if isinstance(f.criterion, RangeCriterion) and f.criterion.lo > f.criterion.hi:
                    raise ValidationError(f"filter {f.id!r}: lo must be <= hi")
            self.filters = {fid: f for fid, f in self.filters.items() if f.view != view.id}
            for f in decoded:
                self.filters[f.id] = f
