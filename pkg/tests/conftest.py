from __future__ import annotations

import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


_ACCEPTANCE = pytest.StashKey[list]()


class _Criterion:
    """Times one acceptance criterion and records a PASS/FAIL line for the summary."""

    def __init__(self, config, number: int, title: str, budget: float):
        self.config, self.number, self.title, self.budget = config, number, title, budget
        self.detail = ""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and elapsed <= self.budget
        note = self.detail if exc_type is None else f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        if exc_type is None and elapsed > self.budget:
            note += f" over budget ({self.budget:.0f} s)"
        line = f"criterion {self.number} {'PASS' if ok else 'FAIL'} [{elapsed:.1f} s] {self.title}: {note}"
        self.config.stash.setdefault(_ACCEPTANCE, []).append(line)
        tr = self.config.pluginmanager.get_plugin("terminalreporter")
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        if exc_type is None:
            assert elapsed <= self.budget, f"took {elapsed:.1f} s, budget {self.budget} s"
        return False


@pytest.fixture
def criterion(request):
    def make(number: int, title: str, budget: float) -> _Criterion:
        return _Criterion(request.config, number, title, budget)

    return make


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
