from __future__ import annotations

import pytest

_LOG_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG_KEY] = []


@pytest.fixture
def acceptance_log(request) -> list:
    """Shared list of one-line acceptance verdicts, printed at session end."""
    return request.config.stash[_LOG_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LOG_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: s.split()[1]):
        terminalreporter.write_line(line)
