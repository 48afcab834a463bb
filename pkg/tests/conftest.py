import pytest

from dfgfold.formats import bundled_lpf, bundled_spec
from dfgfold.transforms import fold


@pytest.fixture(scope="session")
def lpf():
    return bundled_lpf()


@pytest.fixture(scope="session")
def lpf_spec():
    return bundled_spec()


@pytest.fixture(scope="session")
def lpf_arch(lpf, lpf_spec):
    return fold(lpf, lpf_spec)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
