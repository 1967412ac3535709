import os

import pytest

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one line per acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number: int, name: str, passed: bool, detail: str = ""):
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        print(line)
        lines.append((number, line))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
