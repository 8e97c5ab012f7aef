import pytest
from hypothesis import HealthCheck, settings

from hodge_dgg import build_complex
from hodge_dgg.generators import octahedron_boundary, sphere_boundary

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def tri():
    return build_complex([[0, 1, 2]])


@pytest.fixture
def tri_nonreduced():
    return build_complex([[0, 1, 2]], reduced=False)


@pytest.fixture
def tetra():
    return sphere_boundary(4)


@pytest.fixture
def octa():
    return octahedron_boundary()


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
