"""Weighted viewpoint differences.

Two viewpoints differ on an assignment key when their values disagree
or the key exists on one side only; a one-sided key counts at full
weight because loading a different relation must register as a major
difference. The raw distance is the weighted sum over all differing
keys, grouped by category for attribution. The 0-100% normalization
divides by the summed weight of the two viewpoints' key union, so a
pair differing on every key lands exactly at 100%.

Weights and distances are exact decimals end to end: the metric axioms
(symmetry, triangle inequality) hold without float tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .errors import ValidationError
from .projection import DistanceMatrix
from .schema import AssignmentKey, PreferenceSchema, ScopeLevel, format_decimal, lookup
from .viewpoint import Viewpoint
from .xmlio import Node, parse_document, render_document, require_attr, write_atomic

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PreferenceDelta:
    key: AssignmentKey
    left: str | None  # None = absent on that side
    right: str | None
    weight: Decimal


@dataclass(frozen=True)
class CategoryDiff:
    category: str
    deltas: tuple[PreferenceDelta, ...]
    distance: Decimal  # sum of delta weights


@dataclass(frozen=True)
class DiffReport:
    left_id: str
    right_id: str
    categories: tuple[CategoryDiff, ...]  # distance descending, ties by name
    raw_distance: Decimal
    max_distance: Decimal
    normalized_percent: Decimal  # in [0, 100]


def _category_sort_key(c: CategoryDiff):
    return (-c.distance, c.category)


def diff(v1: Viewpoint, v2: Viewpoint, schema: PreferenceSchema) -> DiffReport:
    """Weighted diff of two viewpoints; metadata never contributes."""
    left_map = v1.snapshot.assignment_map
    right_map = v2.snapshot.assignment_map
    union = sorted(set(left_map) | set(right_map), key=lambda k: k.sort_key())
    by_category: dict[str, list[PreferenceDelta]] = {}
    for key in union:
        definition = lookup(schema, key.pref_id)
        left = left_map.get(key)
        right = right_map.get(key)
        if left == right:
            continue
        by_category.setdefault(definition.category, []).append(
            PreferenceDelta(key, left, right, definition.weight)
        )
    categories = tuple(
        sorted(
            (
                CategoryDiff(name, tuple(deltas), sum((d.weight for d in deltas), Decimal(0)))
                for name, deltas in by_category.items()
            ),
            key=_category_sort_key,
        )
    )
    raw = sum((c.distance for c in categories), Decimal(0))
    max_distance = calibrate_scale(v1, v2, schema)
    if max_distance == 0 or raw == 0:
        normalized = Decimal(0)
    else:
        ratio = raw / max_distance
        if ratio > 1:
            ratio = Decimal(1)
        normalized = ratio * Decimal(100)
    return DiffReport(
        left_id=v1.file_meta.name,
        right_id=v2.file_meta.name,
        categories=categories,
        raw_distance=raw,
        max_distance=max_distance,
        normalized_percent=normalized,
    )


def calibrate_scale(v1: Viewpoint, v2: Viewpoint, schema: PreferenceSchema) -> Decimal:
    """Upper bound of the color scale: summed weight of the key union.

    Completely different viewpoints (every union key differs) therefore
    map exactly to 100%.
    """
    union = sorted(
        set(v1.snapshot.assignment_map) | set(v2.snapshot.assignment_map),
        key=lambda k: k.sort_key(),
    )
    return sum((lookup(schema, key.pref_id).weight for key in union), Decimal(0))


def top_categories(report: DiffReport, k: int = 3) -> list[tuple[str, Decimal]]:
    """The k biggest differing categories (already ordered)."""
    return [(c.category, c.distance) for c in report.categories[:k]]


def distance_matrix(
    viewpoints: list[Viewpoint],
    schema: PreferenceSchema,
    labels: list[str] | None = None,
) -> DistanceMatrix:
    """Symmetric matrix of raw pairwise distances (floats for the MDS)."""
    if not viewpoints:
        raise ValidationError("distance matrix needs at least one viewpoint")
    if labels is None:
        labels = [vp.file_meta.name for vp in viewpoints]
    if len(labels) != len(viewpoints):
        raise ValidationError("labels must match viewpoints one-to-one")
    for label, vp in zip(labels, viewpoints):
        try:
            for key in vp.snapshot.assignment_map:
                definition = lookup(schema, key.pref_id)
                if key.scope not in definition.scopes:
                    raise ValidationError(
                        f"preference {key.pref_id!r} is not applicable at {key.scope.value} scope"
                    )
        except ValidationError as exc:
            raise ValidationError(f"viewpoint {label!r}: {exc}") from None
    n = len(viewpoints)
    values = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            raw = float(diff(viewpoints[i], viewpoints[j], schema).raw_distance)
            values[i][j] = raw
            values[j][i] = raw
    return DistanceMatrix(tuple(labels), tuple(tuple(row) for row in values))


# ── Diff XML ───────────────────────────────────────────────────────────


def to_xml(report: DiffReport) -> str:
    root = Node(
        "viewpoint-diff",
        [
            ("format-version", str(FORMAT_VERSION)),
            ("left", report.left_id),
            ("right", report.right_id),
            ("raw-distance", format_decimal(report.raw_distance)),
            ("max-distance", format_decimal(report.max_distance)),
            ("normalized-percent", format_decimal(report.normalized_percent)),
        ],
    )
    for category in report.categories:
        cat_node = Node(
            "category",
            [("name", category.category), ("distance", format_decimal(category.distance))],
        )
        for delta in category.deltas:
            pref = (
                Node("preference")
                .attr("id", delta.key.pref_id)
                .attr("scope", delta.key.scope.value)
                .attr("instance", delta.key.instance)
                .attr("weight", format_decimal(delta.weight))
            )
            for tag, value in (("left", delta.left), ("right", delta.right)):
                side = Node(tag)
                if value is None:
                    side.attr("missing", "true")
                else:
                    side.text = value or None
                pref.child(side)
            cat_node.child(pref)
        root.child(cat_node)
    return render_document(root)


def diff_to_xml(report: DiffReport, path) -> None:
    """Write the canonical diff XML atomically."""
    write_atomic(path, to_xml(report))


def _decimal_attr(elem, name: str, where: str) -> Decimal:
    text = require_attr(elem, name, where)
    try:
        return Decimal(text)
    except InvalidOperation:
        raise ValidationError(f"{where}: {name} is not a number: {text!r}") from None


def diff_from_xml(path) -> DiffReport:
    """Parse a diff file back; numbers carry the serialized precision."""
    root = parse_document(path)
    where = str(path)
    if root.tag != "viewpoint-diff":
        raise ValidationError(f"{where}: expected <viewpoint-diff>, found <{root.tag}>")
    version = require_attr(root, "format-version", where)
    if version != str(FORMAT_VERSION):
        raise ValidationError(f"{where}: unknown format-version {version!r}")
    categories = []
    for cat_elem in root:
        if cat_elem.tag != "category":
            raise ValidationError(f"{where}: unexpected element <{cat_elem.tag}>")
        deltas = []
        for pref_elem in cat_elem:
            left_elem = pref_elem.find("left")
            right_elem = pref_elem.find("right")
            if pref_elem.tag != "preference" or left_elem is None or right_elem is None:
                raise ValidationError(f"{where}: malformed <preference> delta")

            def side_value(elem):
                if elem.get("missing") == "true":
                    return None
                return elem.text or ""

            deltas.append(
                PreferenceDelta(
                    key=AssignmentKey(
                        require_attr(pref_elem, "id", where),
                        ScopeLevel.parse(require_attr(pref_elem, "scope", where)),
                        pref_elem.get("instance", ""),
                    ),
                    left=side_value(left_elem),
                    right=side_value(right_elem),
                    weight=_decimal_attr(pref_elem, "weight", where),
                )
            )
        categories.append(
            CategoryDiff(
                category=require_attr(cat_elem, "name", where),
                deltas=tuple(deltas),
                distance=_decimal_attr(cat_elem, "distance", where),
            )
        )
    return DiffReport(
        left_id=require_attr(root, "left", where),
        right_id=require_attr(root, "right", where),
        categories=tuple(categories),
        raw_distance=_decimal_attr(root, "raw-distance", where),
        max_distance=_decimal_attr(root, "max-distance", where),
        normalized_percent=_decimal_attr(root, "normalized-percent", where),
    )
