import numpy as np
import pytest

from dipbat import PhysicalParams

ACCEPTANCE_LINES = []


@pytest.fixture
def unit_params():
    """All masses and lengths 1, centres of mass at mid-link, no rotational inertia."""
    return PhysicalParams(1.0, 1.0, 1.0, 1.0, 1.0, link1_com=0.5, link2_com=0.5,
                          link1_inertia=0.0, link2_inertia=0.0, cart_friction=0.0,
                          gravity=10.0)


@pytest.fixture
def default_params():
    return PhysicalParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
