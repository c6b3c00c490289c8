import pytest

from mtjsng.device import DeviceParams
from mtjsng.energy import OperatingPoints

# Lines recorded by the acceptance module, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def params() -> DeviceParams:
    return DeviceParams()


@pytest.fixture(scope="session")
def ops() -> OperatingPoints:
    return OperatingPoints()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
