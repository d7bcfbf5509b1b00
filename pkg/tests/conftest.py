import numpy as np
import pytest

_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line, then assert it.

    ``criterion(label, ok, detail)`` appends ``label: PASS|FAIL detail`` to
    the report printed at the end of the session.
    """

    def record(label, ok, detail):
        request.config.stash[_RESULTS].append(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_RESULTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
