import os
from pathlib import Path

import pytest

from traceview import ApplicationState, default_areas, default_schema

DATA_DIR = Path(__file__).parent / "data"

_acceptance_lines: list[str] = []


def record_acceptance(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f"  {detail}" if detail else ""
    _acceptance_lines.append(f"[acceptance] {name}: {status} in {elapsed:.2f}s{suffix}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def areas():
    return default_areas()


@pytest.fixture(scope="session")
def ministries_csv():
    return DATA_DIR / "ministries_budget.csv"


@pytest.fixture(scope="session")
def schools_csv():
    return DATA_DIR / "primary_schools.csv"


@pytest.fixture
def pinned_env(monkeypatch):
    """Deterministic clock and owner for byte-exact serialization."""
    monkeypatch.setenv("TRACEVIEW_CLOCK", "2026-08-08T12:00:00Z")
    monkeypatch.setenv("TRACEVIEW_USER", "analyst")


@pytest.fixture
def budget_state(schema, ministries_csv) -> ApplicationState:
    """Host with the ministries fixture loaded and two linked views."""
    state = ApplicationState(schema)
    state.load_dataset(ministries_csv, time_column="year")
    state.add_view("v1", "ministries_budget", "pie", "master")
    state.add_view("v2", "ministries_budget", "table", "detail")
    return state
