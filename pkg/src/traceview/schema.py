"""Preference universe: scoped, categorized, weighted definitions.

Every configurable aspect of the host is a *preference* classified along
two axes: the scope it can be set at (whole application, one relation,
one view) and its functional category (UI layout, data displayed, ...).
Each definition carries a non-negative weight consumed by the viewpoint
distance model; the shipped default schema documents its hand-chosen
weights inline.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from functools import cached_property
from importlib import resources

from .errors import UnknownPreferenceError, ValidationError
from .xmlio import check_xml_safe, parse_document, parse_string, require_attr

FORMAT_VERSION = 1

_NAME_RE = re.compile(r"^[a-z0-9-]+$")
_COLOR_RE = re.compile(r"^#[0-9a-f]{6}$")


class ScopeLevel(Enum):
    """Level a preference assignment applies to; ordered for sorting."""

    APPLICATION = "application"
    RELATION = "relation"
    VIEW = "view"

    @property
    def order(self) -> int:
        return _SCOPE_ORDER[self]

    def __lt__(self, other: "ScopeLevel") -> bool:
        if not isinstance(other, ScopeLevel):
            return NotImplemented
        return self.order < other.order

    @classmethod
    def parse(cls, token: str) -> "ScopeLevel":
        try:
            return cls(token)
        except ValueError:
            raise ValidationError(f"unknown scope level: {token!r}") from None


_SCOPE_ORDER = {ScopeLevel.APPLICATION: 0, ScopeLevel.RELATION: 1, ScopeLevel.VIEW: 2}

KIND_NAMES = ("boolean", "integer", "decimal", "string", "enum", "color", "attribute-list")


@dataclass(frozen=True)
class PrefKind:
    """Value type of a preference; enum kinds carry their allowed values."""

    name: str
    choices: tuple[str, ...] = ()

    def spell(self) -> str:
        if self.name == "enum":
            return f"enum({','.join(self.choices)})"
        return self.name

    @classmethod
    def parse(cls, text: str) -> "PrefKind":
        if text.startswith("enum(") and text.endswith(")"):
            inner = text[5:-1]
            choices = tuple(c for c in inner.split(",") if c)
            if not choices:
                raise ValidationError("enum kind needs at least one allowed value")
            return cls("enum", choices)
        if text not in KIND_NAMES or text == "enum":
            raise ValidationError(f"unknown preference kind: {text!r}")
        return cls(text)


def format_decimal(value: Decimal) -> str:
    """Canonical number spelling: up to 6 fractional digits, zeros trimmed."""
    if value.as_tuple().exponent < -6:
        value = value.quantize(Decimal("0.000001"))
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


def canonical_value(kind: PrefKind, value: object) -> str:
    """Normalize *value* to its canonical string form for *kind*.

    Raises ValidationError on a type mismatch. Comparison of preference
    values elsewhere is exact string equality on this form.
    """
    if kind.name == "boolean":
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, str) and value in ("true", "false"):
            return value
        raise ValidationError(f"expected boolean, got {value!r}")
    if kind.name == "integer":
        if isinstance(value, bool):
            raise ValidationError(f"expected integer, got {value!r}")
        if isinstance(value, int):
            return str(value)
        if isinstance(value, str):
            try:
                return str(int(value.strip() or "x"))
            except ValueError:
                raise ValidationError(f"expected integer, got {value!r}") from None
        raise ValidationError(f"expected integer, got {value!r}")
    if kind.name == "decimal":
        if isinstance(value, bool):
            raise ValidationError(f"expected decimal, got {value!r}")
        if isinstance(value, (int, float, Decimal)):
            return format_decimal(Decimal(str(value)))
        if isinstance(value, str):
            try:
                return format_decimal(Decimal(value.strip()))
            except InvalidOperation:
                raise ValidationError(f"expected decimal, got {value!r}") from None
        raise ValidationError(f"expected decimal, got {value!r}")
    if kind.name == "string":
        if isinstance(value, str):
            return check_xml_safe(value)
        raise ValidationError(f"expected string, got {value!r}")
    if kind.name == "enum":
        if isinstance(value, str) and value in kind.choices:
            return value
        raise ValidationError(f"expected one of {kind.choices}, got {value!r}")
    if kind.name == "color":
        if isinstance(value, str):
            lowered = value.lower()
            if _COLOR_RE.match(lowered):
                return lowered
        raise ValidationError(f"expected #rrggbb color, got {value!r}")
    if kind.name == "attribute-list":
        if isinstance(value, str):
            items = [p for p in value.split(",") if p != ""] if value else []
        elif isinstance(value, (list, tuple)):
            items = list(value)
        else:
            raise ValidationError(f"expected attribute list, got {value!r}")
        for item in items:
            if not isinstance(item, str) or "," in item:
                raise ValidationError(f"bad attribute name in list: {item!r}")
            check_xml_safe(item, "attribute name")
        return ",".join(items)
    raise ValidationError(f"unknown kind: {kind.name!r}")


@dataclass(frozen=True)
class PreferenceCategory:
    name: str
    display_name: str


@dataclass(frozen=True)
class PreferenceDefinition:
    id: str
    category: str
    scopes: frozenset[ScopeLevel]
    kind: PrefKind
    weight: Decimal
    default: str
    origin: str  # "explicit" (menu-set) or "implicit" (interaction-derived)


@dataclass(frozen=True)
class AssignmentKey:
    """Identity of one preference assignment inside a state or viewpoint.

    instance is "" at application scope, a relation name at relation
    scope and a view id at view scope.
    """

    pref_id: str
    scope: ScopeLevel
    instance: str = ""

    def __post_init__(self):
        if (self.scope is ScopeLevel.APPLICATION) != (self.instance == ""):
            raise ValidationError(
                f"instance must be empty exactly at application scope: {self.pref_id} "
                f"{self.scope.value} {self.instance!r}"
            )

    def sort_key(self) -> tuple:
        return (self.scope.order, self.instance, self.pref_id)


@dataclass(frozen=True)
class PreferenceSchema:
    format_version: int
    categories: tuple[PreferenceCategory, ...]
    preferences: tuple[PreferenceDefinition, ...]

    @cached_property
    def by_id(self) -> dict[str, PreferenceDefinition]:
        return {d.id: d for d in self.preferences}

    @cached_property
    def category_names(self) -> frozenset[str]:
        return frozenset(c.name for c in self.categories)


def lookup(schema: PreferenceSchema, pref_id: str) -> PreferenceDefinition:
    """Return the definition for *pref_id* or raise UnknownPreferenceError."""
    definition = schema.by_id.get(pref_id)
    if definition is None:
        raise UnknownPreferenceError(pref_id)
    return definition


def applicable_at(schema: PreferenceSchema, pref_id: str, level: ScopeLevel) -> bool:
    """True iff the preference may be assigned at *level* (Yes/No cell)."""
    return level in lookup(schema, pref_id).scopes


def total_weight(schema: PreferenceSchema) -> Decimal:
    return sum((d.weight for d in schema.preferences), Decimal(0))


def _validate(schema: PreferenceSchema) -> PreferenceSchema:
    seen_categories: set[str] = set()
    for cat in schema.categories:
        if not _NAME_RE.match(cat.name):
            raise ValidationError(f"category {cat.name!r}: name must match [a-z0-9-]+")
        if cat.name in seen_categories:
            raise ValidationError(f"category {cat.name!r}: duplicate name")
        seen_categories.add(cat.name)
    used: set[str] = set()
    seen_ids: set[str] = set()
    for d in schema.preferences:
        where = f"preference {d.id!r}"
        if not d.id:
            raise ValidationError("preference with empty id")
        if d.id in seen_ids:
            raise ValidationError(f"{where}: duplicate id")
        seen_ids.add(d.id)
        if d.category not in seen_categories:
            raise ValidationError(f"{where}: unknown category {d.category!r}")
        if not d.scopes:
            raise ValidationError(f"{where}: empty scope set")
        if d.weight < 0:
            raise ValidationError(f"{where}: negative weight")
        if d.origin not in ("explicit", "implicit"):
            raise ValidationError(f"{where}: origin must be explicit or implicit")
        try:
            canonical = canonical_value(d.kind, d.default)
        except ValidationError as exc:
            raise ValidationError(f"{where}: default not valid for kind {d.kind.spell()}: {exc}") from None
        if canonical != d.default:
            raise ValidationError(f"{where}: default {d.default!r} is not in canonical form")
        used.add(d.category)
    for cat in schema.categories:
        if cat.name not in used:
            raise ValidationError(f"category {cat.name!r}: no preferences declared under it")
    return schema


def _schema_from_root(root) -> PreferenceSchema:
    if root.tag != "preference-schema":
        raise ValidationError(f"expected <preference-schema>, found <{root.tag}>")
    version = require_attr(root, "format-version", "preference-schema")
    if version != str(FORMAT_VERSION):
        raise ValidationError(f"unknown format-version: {version!r}")
    categories = []
    preferences = []
    for elem in root:
        if elem.tag == "category":
            categories.append(
                PreferenceCategory(
                    name=require_attr(elem, "name", "category"),
                    display_name=require_attr(elem, "display-name", "category"),
                )
            )
        elif elem.tag == "preference":
            pref_id = require_attr(elem, "id", "preference")
            where = f"preference {pref_id!r}"
            scopes = frozenset(
                ScopeLevel.parse(tok) for tok in require_attr(elem, "scopes", where).split(",") if tok
            )
            weight_text = require_attr(elem, "weight", where)
            try:
                weight = Decimal(weight_text)
            except InvalidOperation:
                raise ValidationError(f"{where}: weight {weight_text!r} is not a number") from None
            preferences.append(
                PreferenceDefinition(
                    id=pref_id,
                    category=require_attr(elem, "category", where),
                    scopes=scopes,
                    kind=PrefKind.parse(require_attr(elem, "kind", where)),
                    weight=weight,
                    default=require_attr(elem, "default", where),
                    origin=require_attr(elem, "origin", where),
                )
            )
        else:
            raise ValidationError(f"unexpected element <{elem.tag}> in schema")
    return _validate(
        PreferenceSchema(
            format_version=int(version),
            categories=tuple(categories),
            preferences=tuple(preferences),
        )
    )


def parse_schema(text: str) -> PreferenceSchema:
    return _schema_from_root(parse_string(text))


def load_schema(path) -> PreferenceSchema:
    """Load and validate a schema XML file."""
    return _schema_from_root(parse_document(path))


def default_schema() -> PreferenceSchema:
    """The schema shipped with the package (7 categories, 17 preferences)."""
    text = resources.files("traceview.data").joinpath("default-schema.xml").read_text("utf-8")
    return parse_schema(text)


def default_schema_text() -> str:
    return resources.files("traceview.data").joinpath("default-schema.xml").read_text("utf-8")
