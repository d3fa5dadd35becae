"""Preloaded geographic area list used by viewpoint content metadata."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from importlib import resources

from .errors import ValidationError


@dataclass(frozen=True)
class Area:
    id: str
    name: str
    icon: str


@dataclass(frozen=True)
class AreaList:
    areas: tuple[Area, ...]

    @cached_property
    def by_id(self) -> dict[str, Area]:
        return {a.id: a for a in self.areas}

    def __contains__(self, area_id: str) -> bool:
        return area_id in self.by_id

    def get(self, area_id: str) -> Area | None:
        return self.by_id.get(area_id)

    def require(self, area_id: str) -> Area:
        area = self.by_id.get(area_id)
        if area is None:
            raise ValidationError(f"unknown area id: {area_id!r}")
        return area


def _parse(text: str, where: str) -> AreaList:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["id", "name", "icon"]:
        raise ValidationError(f"{where}: expected header id,name,icon")
    areas = []
    seen = set()
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise ValidationError(f"{where}: bad area row {row!r}")
        area_id, name, icon = row
        if area_id in seen:
            raise ValidationError(f"{where}: duplicate area id {area_id!r}")
        seen.add(area_id)
        areas.append(Area(area_id, name, icon))
    return AreaList(tuple(areas))


def load_areas(path) -> AreaList:
    with open(path, encoding="utf-8", newline="") as handle:
        return _parse(handle.read(), str(path))


def default_areas() -> AreaList:
    text = resources.files("traceview.data").joinpath("areas.csv").read_text("utf-8")
    return _parse(text, "packaged areas.csv")


def default_areas_text() -> str:
    return resources.files("traceview.data").joinpath("areas.csv").read_text("utf-8")
