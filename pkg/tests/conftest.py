import numpy as np
import pytest

from optosteer.sweep import SweepConfig, run_sweep

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_rows():
    """The default 401-point sweep, computed once per session."""
    return run_sweep(SweepConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Record one acceptance line; shown in the terminal summary."""
    def _report(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {number:>2}. {title}"
        if detail:
            line += f" -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
