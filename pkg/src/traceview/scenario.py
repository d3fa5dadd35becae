"""Scenarios: ordered viewpoint references with playback.

A scenario file never embeds viewpoint content, only references, so a
broken reference hurts exactly one playback position. References are
stored relative to the scenario file's directory when possible and
resolved lazily at positioning time.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from datetime import datetime

from .areas import AreaList
from .errors import PlaybackError, TraceViewError, ValidationError
from .hoststate import ApplicationState
from .viewpoint import Viewpoint, parse_timestamp
from .viewpoint import apply as _apply_viewpoint
from .viewpoint import load_xml as _load_viewpoint
from .xmlio import Node, check_xml_safe, parse_document, render_document, require_attr, write_atomic

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ScenarioStep:
    order: int  # 1-based, contiguous
    ref: str  # path to a viewpoint XML; may repeat across steps


@dataclass(frozen=True)
class Scenario:
    format_version: int
    name: str
    path: str | None
    steps: tuple[ScenarioStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def resolved_ref(self, step: ScenarioStep) -> str:
        """Absolute location of a step's viewpoint file."""
        if os.path.isabs(step.ref):
            return step.ref
        base = os.path.dirname(self.path) if self.path else os.getcwd()
        return os.path.normpath(os.path.join(base, step.ref))


def create(name: str) -> Scenario:
    if not name:
        raise ValidationError("scenario name must be non-empty")
    check_xml_safe(name, "scenario name")
    return Scenario(FORMAT_VERSION, name, None, ())


def _renumber(refs: list[str]) -> tuple[ScenarioStep, ...]:
    return tuple(ScenarioStep(i + 1, ref) for i, ref in enumerate(refs))


def insert_step(sc: Scenario, position: int, ref) -> Scenario:
    """Insert at 1-based *position* (n+1 appends); duplicates allowed."""
    n = len(sc.steps)
    if not 1 <= position <= n + 1:
        raise ValidationError(f"insert position {position} out of range 1..{n + 1}")
    refs = [s.ref for s in sc.steps]
    refs.insert(position - 1, os.path.abspath(os.fspath(ref)))
    return replace(sc, steps=_renumber(refs))


def move_step(sc: Scenario, frm: int, to: int) -> Scenario:
    n = len(sc.steps)
    if not (1 <= frm <= n and 1 <= to <= n):
        raise ValidationError(f"move positions must be in 1..{n}")
    refs = [s.ref for s in sc.steps]
    ref = refs.pop(frm - 1)
    refs.insert(to - 1, ref)
    return replace(sc, steps=_renumber(refs))


def remove_step(sc: Scenario, position: int) -> Scenario:
    n = len(sc.steps)
    if not 1 <= position <= n:
        raise ValidationError(f"remove position {position} out of range 1..{n}")
    refs = [s.ref for s in sc.steps]
    del refs[position - 1]
    return replace(sc, steps=_renumber(refs))


def from_refs(name: str, refs: list[str]) -> Scenario:
    """Build a scenario from an ordered ref list, revisits preserved."""
    sc = create(name)
    return replace(sc, steps=_renumber(list(refs)))


def save_xml(sc: Scenario, path) -> Scenario:
    """Write canonical XML; refs are rewritten relative to the file."""
    path_text = os.path.abspath(os.fspath(path))
    directory = os.path.dirname(path_text)
    stored_refs = []
    for step in sc.steps:
        resolved = sc.resolved_ref(step)
        try:
            stored_refs.append(os.path.relpath(resolved, directory))
        except ValueError:  # different drive on Windows
            stored_refs.append(resolved)
    saved = Scenario(sc.format_version, sc.name, path_text, _renumber(stored_refs))
    root = Node("scenario", [("format-version", str(saved.format_version)), ("name", saved.name)])
    for step in saved.steps:
        root.child(Node("step", [("order", str(step.order)), ("ref", step.ref)]))
    write_atomic(path_text, render_document(root))
    return saved


def load_xml(path) -> Scenario:
    """Parse a scenario file; refs stay unresolved until playback."""
    path_text = os.path.abspath(os.fspath(path))
    if not os.path.exists(path_text):
        raise FileNotFoundError(f"no such scenario file: {path_text}")
    root = parse_document(path_text)
    if root.tag != "scenario":
        raise ValidationError(f"{path_text}: expected <scenario>, found <{root.tag}>")
    version = require_attr(root, "format-version", path_text)
    if version != str(FORMAT_VERSION):
        raise ValidationError(f"{path_text}: unknown format-version {version!r}")
    name = require_attr(root, "name", path_text)
    if not name:
        raise ValidationError(f"{path_text}: scenario name must be non-empty")
    steps = []
    for elem in root:
        if elem.tag != "step":
            raise ValidationError(f"{path_text}: unexpected element <{elem.tag}>")
        order_text = require_attr(elem, "order", f"{path_text} <step>")
        try:
            order = int(order_text)
        except ValueError:
            raise ValidationError(f"{path_text}: bad step order {order_text!r}") from None
        steps.append(ScenarioStep(order, require_attr(elem, "ref", f"{path_text} <step>")))
    expected = list(range(1, len(steps) + 1))
    if [s.order for s in steps] != expected:
        raise ValidationError(f"{path_text}: step orders must be contiguous 1..{len(steps)}")
    return Scenario(int(version), name, path_text, tuple(steps))


# ── Playback ───────────────────────────────────────────────────────────


class PlaybackCursor:
    """Navigates one scenario over one bound ApplicationState.

    Position 0 means nothing applied yet. Each successful positioning
    loads the referenced viewpoint and applies it; failures leave both
    position and state untouched.
    """

    def __init__(
        self,
        scenario: Scenario,
        state: ApplicationState,
        *,
        areas: AreaList | None = None,
    ):
        self.scenario = scenario
        self.state = state
        self.areas = areas
        self._position = 0

    @property
    def position(self) -> int:
        return self._position

    def __len__(self) -> int:
        return len(self.scenario.steps)

    def goto(self, index: int) -> Viewpoint:
        """Apply step *index* (1-based); idempotent state-wise."""
        n = len(self.scenario.steps)
        if not 1 <= index <= n:
            raise ValidationError(f"step {index} out of range 1..{n}")
        step = self.scenario.steps[index - 1]
        resolved = self.scenario.resolved_ref(step)
        try:
            vp = _load_viewpoint(resolved, self.state.schema, areas=self.areas)
            _apply_viewpoint(vp, self.state)
        except (OSError, TraceViewError) as exc:
            raise PlaybackError(index, resolved, str(exc)) from exc
        self._position = index
        return vp

    def next(self) -> bool:
        """Advance one step; False (and no move) at the end."""
        if self._position >= len(self.scenario.steps):
            return False
        self.goto(self._position + 1)
        return True

    def prev(self) -> bool:
        if self._position <= 1:
            return False
        self.goto(self._position - 1)
        return True


def playback(
    sc: Scenario,
    state: ApplicationState,
    *,
    areas: AreaList | None = None,
) -> PlaybackCursor:
    return PlaybackCursor(sc, state, areas=areas)


# ── Preview ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class StepPreview:
    order: int
    ref: str
    resolved: str
    broken: bool
    name: str | None = None
    image: str | None = None
    area_id: str | None = None
    area_icon: str | None = None
    attitude: str | None = None
    priority: str | None = None
    owner: str | None = None
    saved_at: datetime | None = None
    description: str | None = None


def preview(sc: Scenario, *, areas: AreaList | None = None) -> list[StepPreview]:
    """Metadata summary per step; broken refs degrade, never fail."""
    entries = []
    for step in sc.steps:
        resolved = sc.resolved_ref(step)
        try:
            root = parse_document(resolved)
            meta = root.find("meta")
            file_elem = meta.find("file")
            content_elem = meta.find("content")
            owner_elem = meta.find("owner")
            area_id = content_elem.get("area-id")
            icon = None
            if area_id and areas is not None:
                area = areas.get(area_id)
                icon = area.icon if area else None
            entries.append(
                StepPreview(
                    order=step.order,
                    ref=step.ref,
                    resolved=resolved,
                    broken=False,
                    name=require_attr(file_elem, "name", resolved),
                    image=file_elem.get("image"),
                    area_id=area_id,
                    area_icon=icon,
                    attitude=require_attr(owner_elem, "attitude", resolved),
                    priority=require_attr(owner_elem, "priority", resolved),
                    owner=require_attr(owner_elem, "name", resolved),
                    saved_at=parse_timestamp(require_attr(file_elem, "saved-at", resolved)),
                    description=content_elem.text or "",
                )
            )
        except (OSError, TraceViewError, AttributeError):
            entries.append(StepPreview(order=step.order, ref=step.ref, resolved=resolved, broken=True))
    return entries
