import pytest

from adamsext import verify
from adamsext.milnor import AlgebraContext

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ctx5():
    return AlgebraContext(5)


@pytest.fixture(scope="session")
def ctx3():
    return AlgebraContext(3)


@pytest.fixture(scope="session")
def sphere5():
    """Sphere resolution at p=5, shared with the verification suites."""
    return verify.resolution(5, "sphere", 3, 200)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
