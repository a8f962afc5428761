"""Shared fixtures and the acceptance-criteria report hook."""

import pytest

_criterion_lines = []


@pytest.fixture
def criterion():
    """Record and print one pass/fail line for an acceptance criterion."""

    def _report(num, name, ok, detail=""):
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d} [{verdict}] {name}"
        if detail:
            line += f" :: {detail}"
        _criterion_lines.append((num, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
