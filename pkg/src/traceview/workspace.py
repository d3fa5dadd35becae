"""Workspace layout: one directory holding schema, areas, viewpoints,
scenarios and the persistent CLI session.

    <root>/
      schema.xml      active preference schema (one per workspace)
      areas.csv       preloaded geographic area list
      viewpoints/     saved viewpoint XML files
      scenarios/      saved scenario XML files
      session.xml     the CLI's working state, itself a viewpoint file

Viewpoint and scenario ids used by the HTTP API are workspace-relative
file paths, percent-encoded so they survive inside URL segments.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from urllib.parse import quote, unquote

from .areas import AreaList, default_areas_text, load_areas
from .errors import StorageError, ValidationError
from .hoststate import ApplicationState
from .schema import PreferenceSchema, default_schema_text, load_schema
from .viewpoint import MetaDraft, Viewpoint, apply, capture, load_xml, save_xml


@dataclass
class Workspace:
    root: Path

    @property
    def schema_path(self) -> Path:
        return self.root / "schema.xml"

    @property
    def areas_path(self) -> Path:
        return self.root / "areas.csv"

    @property
    def viewpoint_dir(self) -> Path:
        return self.root / "viewpoints"

    @property
    def scenario_dir(self) -> Path:
        return self.root / "scenarios"

    @property
    def session_path(self) -> Path:
        return self.root / "session.xml"

    @classmethod
    def init(cls, root) -> "Workspace":
        """Create the directory layout; existing files are left alone."""
        ws = cls(Path(root))
        ws.root.mkdir(parents=True, exist_ok=True)
        ws.viewpoint_dir.mkdir(exist_ok=True)
        ws.scenario_dir.mkdir(exist_ok=True)
        if not ws.schema_path.exists():
            ws.schema_path.write_text(default_schema_text(), encoding="utf-8")
        if not ws.areas_path.exists():
            ws.areas_path.write_text(default_areas_text(), encoding="utf-8")
        return ws

    @classmethod
    def open(cls, root) -> "Workspace":
        ws = cls(Path(root))
        if not ws.schema_path.exists():
            raise StorageError(f"not a workspace (no schema.xml): {ws.root} — run 'init' first")
        return ws

    @cached_property
    def schema(self) -> PreferenceSchema:
        return load_schema(self.schema_path)

    @cached_property
    def areas(self) -> AreaList:
        return load_areas(self.areas_path)

    # ── Ids (percent-encoded workspace-relative paths) ─────────────

    def id_for(self, path) -> str:
        rel = os.path.relpath(os.path.abspath(os.fspath(path)), self.root)
        return quote(rel.replace(os.sep, "/"), safe="")

    def path_for(self, artifact_id: str) -> Path:
        rel = unquote(artifact_id)
        candidate = (self.root / rel).resolve()
        if not str(candidate).startswith(str(self.root.resolve()) + os.sep):
            raise ValidationError(f"id escapes the workspace: {artifact_id!r}")
        return candidate

    def list_viewpoints(self) -> list[Path]:
        if not self.viewpoint_dir.is_dir():
            return []
        return sorted(p for p in self.viewpoint_dir.rglob("*.xml") if p.is_file())

    def list_scenarios(self) -> list[Path]:
        if not self.scenario_dir.is_dir():
            return []
        return sorted(p for p in self.scenario_dir.rglob("*.xml") if p.is_file())

    # ── Persistent CLI session ─────────────────────────────────────

    def load_session(self) -> ApplicationState:
        state = ApplicationState(self.schema)
        if self.session_path.exists():
            vp = load_xml(self.session_path, self.schema, areas=self.areas)
            apply(vp, state)
        return state

    def save_session(self, state: ApplicationState) -> None:
        vp = capture(state, MetaDraft(name="session"), areas=self.areas)
        save_xml(vp, self.session_path, self.schema)

    def load_viewpoint(self, path) -> Viewpoint:
        return load_xml(path, self.schema, areas=self.areas)
