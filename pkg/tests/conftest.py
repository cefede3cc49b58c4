from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stratih.fixtures import FIXTURES, get_fixture  # noqa: E402
from stratih.stratified import subdivided  # noqa: E402

PSEUDOMANIFOLDS = [n for n, f in FIXTURES.items() if not f.counterexample]

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def strat(name: str, times: int = 0):
    """Fixture stratification after ``times`` subdivisions (cached; treat as read-only)."""
    st = get_fixture(name)
    return subdivided(st, times) if times else st


@pytest.fixture
def fixture_strat():
    return strat


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
