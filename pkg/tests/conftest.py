from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from qhom.qalgebras import (build_general_algebra, build_matrix_algebra,
                            build_special_algebra)
from qhom.quadratic import build_dual_algebra
from qhom.scalars import Q

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Q0 = Fraction(2)

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def B2():
    return build_matrix_algebra(2, q=Q0)


@pytest.fixture(scope="session")
def B2sym():
    return build_matrix_algebra(2, q=Q)


@pytest.fixture(scope="session")
def B3():
    return build_matrix_algebra(3, q=Q0)


@pytest.fixture(scope="session")
def A2():
    return build_special_algebra(2, q=Q0)


@pytest.fixture(scope="session")
def A2sym():
    return build_special_algebra(2, q=Q)


@pytest.fixture(scope="session")
def C2():
    return build_general_algebra(2, q=Q0)


@pytest.fixture(scope="session")
def dual2():
    return build_dual_algebra(2, q=Q0)


@pytest.fixture(scope="session")
def dual2sym():
    return build_dual_algebra(2, q=Q)


@pytest.fixture(scope="session")
def dual3():
    return build_dual_algebra(3, q=Q0)
