import pytest
from hypothesis import HealthCheck, settings

from enforcers.environment import GridSpec, build_grid

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def grid5():
    return build_grid(GridSpec(5, 5))


@pytest.fixture
def grid6():
    return build_grid(GridSpec(6, 6))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
