import time

import pytest

_RESULTS = []


class Criterion:
    """Times one acceptance criterion and records a single PASS/FAIL line."""

    def __init__(self, number: int, title: str, budget: float | None):
        self.number, self.title, self.budget = number, title, budget
        self.checks = []
        self.start = time.perf_counter()

    def check(self, ok, detail: str):
        self.checks.append((bool(ok), detail))

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def finish(self):
        elapsed = self.elapsed
        if self.budget is not None:
            self.check(elapsed <= self.budget, f"runtime {elapsed:.1f}s <= {self.budget:g}s")
        ok = all(c for c, _ in self.checks)
        failed = [d for c, d in self.checks if not c]
        detail = "; ".join(failed if failed else [d for _, d in self.checks])
        line = f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'}  {self.title} ({elapsed:.1f}s): {detail}"
        _RESULTS.append((self.number, line))
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    def make(number, title, budget=None):
        return Criterion(number, title, budget)
    return make


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_RESULTS):
        terminalreporter.write_line(line)
