import numpy as np
import pytest

from spinshift.fixtures import nv_like_curvatures, nv_like_spectrum, single_mode_bundle


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def nv_spectrum():
    return nv_like_spectrum()


@pytest.fixture(scope="session")
def nv_curvatures(nv_spectrum):
    return nv_like_curvatures(nv_spectrum)


@pytest.fixture
def single_mode():
    return single_mode_bundle()


# Acceptance criteria report one line each at the end of the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
