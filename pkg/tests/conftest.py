import time
from contextlib import contextmanager

import pytest

_LINES: list[str] = []


class Gate:
    def __init__(self, label: str, limit: float):
        self.label = label
        self.limit = limit
        self.failures: list[str] = []
        self.notes: list[str] = []

    def check(self, ok: bool, what: str) -> None:
        (self.notes if ok else self.failures).append(what)


@contextmanager
def _gate(label: str, limit: float):
    g = Gate(label, limit)
    start = time.perf_counter()
    try:
        yield g
    except Exception as exc:  # record, then let pytest report it
        g.failures.append(f"error: {exc!r}")
        raise
    finally:
        elapsed = time.perf_counter() - start
        if elapsed >= limit:
            g.failures.append(f"runtime {elapsed:.1f}s exceeds {limit:g}s")
        status = "PASS" if not g.failures else "FAIL"
        detail = "; ".join(g.failures or g.notes)
        line = f"[{status}] {label} ({elapsed:.2f}s / {limit:g}s) {detail}"
        _LINES.append(line)
        print(line)
    assert not g.failures, "; ".join(g.failures)


@pytest.fixture
def gate():
    return _gate


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
