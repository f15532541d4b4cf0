import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_GATE = []


@pytest.fixture
def gate():
    """Record one pass/fail line per acceptance criterion."""
    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        _GATE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _GATE:
        terminalreporter.section("acceptance gate")
        for line in _GATE:
            terminalreporter.write_line(line)
