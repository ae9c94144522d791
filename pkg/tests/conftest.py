import warnings

import pytest

from cavityio import CavityGeometry, OpticalMedium, VACUUM, locate_resonances

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    prev = ACCEPTANCE.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    ACCEPTANCE[criterion] = (bool(ok), detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")


def reference_geometry(loss=1e-3):
    return CavityGeometry(1.0, 0.05, VACUUM, OpticalMedium(1.5 + loss * 1j))


def highq_geometry():
    return CavityGeometry(1.0, 5e-4, VACUUM, OpticalMedium(100 + 0.2j))


@pytest.fixture(scope="session")
def ref_geom():
    return reference_geometry()


@pytest.fixture(scope="session")
def ref_modes(ref_geom):
    return locate_resonances(ref_geom, range(10, 15))


@pytest.fixture(scope="session")
def hq_geom():
    return highq_geometry()


@pytest.fixture(scope="session")
def hq_mode(hq_geom):
    return locate_resonances(hq_geom, [10])[0]


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield
