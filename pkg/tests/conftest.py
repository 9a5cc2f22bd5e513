import time
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def shipped_table():
    from jacobsthal import default_h_table
    return default_h_table()


class AcceptanceGate:
    """Collects one PASS/FAIL line per acceptance criterion.

    The lines are printed as the tests run (visible under ``pytest -s``)
    and replayed in the terminal summary so they also appear in captured
    runs.
    """

    def __init__(self):
        self.lines = []

    @contextmanager
    def criterion(self, number, seconds):
        started = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - started
            assert elapsed < seconds, (
                f"criterion {number:02d} took {elapsed:.2f}s "
                f"(limit {seconds}s)")
        except BaseException:
            self._emit(f"ACCEPTANCE {number:02d} FAIL")
            raise
        self._emit(f"ACCEPTANCE {number:02d} PASS")

    def _emit(self, line):
        self.lines.append(line)
        print(line)


_GATE = AcceptanceGate()


@pytest.fixture
def acceptance():
    return _GATE


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _GATE.lines:
        terminalreporter.section("acceptance criteria")
        for line in _GATE.lines:
            terminalreporter.write_line(line)
