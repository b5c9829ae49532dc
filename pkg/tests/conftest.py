from __future__ import annotations

import sys
import time
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

ACCEPTANCE_LINES: list = []
SUITE_LIMIT = 600.0
_start = [0.0]


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
        elapsed = time.perf_counter() - _start[0]
        ok = elapsed < SUITE_LIMIT
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] full suite runtime ({elapsed:.1f}s < {SUITE_LIMIT:.0f}s)")
