"""Shared fixtures. The acceptance tests report one PASS/FAIL line per
criterion; the hook below replays those lines after the run so they stay
visible even with output capture on."""

import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a named acceptance check: logs '[PASS|FAIL] name: detail'
    and fails the test when ok is false."""

    def record(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
