import numpy as np
import pytest

from almostred.arithmetic import cf_expand
from almostred.cocycle import amo_potential, schrodinger_cocycle
from almostred.conjugacy import complex_conjugacy, real_conjugacy, ConjugacyConfig
from almostred.schrodinger import scan_minimal_energy

SCAN = np.linspace(-2.6, 2.6, 53)


@pytest.fixture(scope="session")
def golden():
    return cf_expand("golden", 64)


@pytest.fixture(scope="session")
def amo03(golden):
    v = amo_potential(0.3)
    E = scan_minimal_energy(golden, v, SCAN)
    return schrodinger_cocycle(golden, E, v)


@pytest.fixture(scope="session")
def comp_result(amo03):
    return complex_conjugacy(amo03, 0.05, 0.02, ConjugacyConfig())


@pytest.fixture(scope="session")
def real_result(amo03):
    # complex band eps = 4 eps' / 3 = 0.02, so the complex run above is reused
    cr = complex_conjugacy(amo03, 0.05, 0.02, ConjugacyConfig())
    return real_conjugacy(amo03, 0.05, 0.015, ConjugacyConfig(), complex_result=cr)


# ---------------------------------------------------------------- acceptance lines

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion; fails the test on FAIL."""
    def record(num, title, checks):
        ok = all(c[1] for c in checks)
        detail = "; ".join(f"{name} {'ok' if good else 'VIOLATED'} ({info})" for name, good, info in checks)
        line = f"{'PASS' if ok else 'FAIL'} criterion {num:2d} [{title}]: {detail}"
        ACCEPTANCE_LINES.append((num, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
