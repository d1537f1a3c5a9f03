import numpy as np
import pytest

from ginibre_dpp import build_ring_basis, build_spectrum


@pytest.fixture(scope="session")
def spec53():
    return build_spectrum(5.0, 3.0)


@pytest.fixture(scope="session")
def ring53(spec53):
    return build_ring_basis(spec53)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
