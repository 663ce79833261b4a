import math

import numpy as np
import pytest

from udua import ChannelParams, GridRegion, build_gain_table

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table1():
    return ChannelParams()


@pytest.fixture(scope="session")
def desk_params():
    return ChannelParams(phi=15)


@pytest.fixture(scope="session")
def region5():
    return GridRegion(5, 5, 10.0)


@pytest.fixture(scope="session")
def table5(desk_params, region5):
    return build_gain_table(desk_params, region5)


def check_association(rates, qos, phi, assoc):
    """Constraint check written against the raw rate matrix: every user on
    exactly one UAV, no UAV above phi users, every link meeting qos, and f
    equal to the sum of assigned rates."""
    rates = np.asarray(rates)
    n_users, n_uavs = rates.shape
    a = list(assoc.assign)
    assert len(a) == n_users
    for j in range(n_uavs):
        assert a.count(j) <= phi
    total = 0.0
    for i, j in enumerate(a):
        assert 0 <= j < n_uavs
        assert rates[i, j] >= qos
        total += rates[i, j]
    assert math.isclose(total, assoc.f, rel_tol=1e-12, abs_tol=1e-9)
