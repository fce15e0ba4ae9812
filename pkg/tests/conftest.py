import numpy as np
import pytest

from stratrad import experiments as ex
from stratrad.config import SolverConfig
from stratrad.spectral_grid import build_wavelength_uniform


@pytest.fixture(scope="session")
def grey_solution():
    return ex.run_grey()


@pytest.fixture(scope="session")
def default_spectral():
    return build_wavelength_uniform()


@pytest.fixture
def small_cfg():
    """Coarse settings for fast solver tests."""
    return SolverConfig(n_tau=12, k_max=6).with_boundary(earth_albedo=0.0, bottom_plain=True)


@pytest.fixture
def small_spectral():
    return build_wavelength_uniform(jmax=40)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
