import numpy as np
import pytest

from apcsf import analysis
from apcsf.curves import ellipse

_ACCEPTANCE = []

TABLE_N = [16, 32, 64, 128]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion (printed at session end)."""

    def _report(key, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return _report


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def convergence_2pi():
    return analysis.run_convergence_study(ellipse(2, 1), TABLE_N, T=0.25)


@pytest.fixture(scope="session")
def convergence_unit():
    return analysis.run_convergence_study(ellipse(2, 1, period=1.0), TABLE_N, T=0.25, period=1.0)
