import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")

np.seterr(all="raise", under="ignore")

acceptance_key = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[acceptance_key] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: prints a PASS/FAIL line and asserts."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[acceptance_key].append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(acceptance_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
