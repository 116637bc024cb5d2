import warnings

import pytest


@pytest.fixture(autouse=True)
def _quiet_integration_warnings():
    # scipy may warn on oscillatory tails that still meet tolerance
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        yield


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
