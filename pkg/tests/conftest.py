import pytest

from rcthresh import rayleigh, unit_mean_spec

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ray():
    return rayleigh()


@pytest.fixture(scope="session", params=[-5.0, 0.0, 3.0], ids=lambda k: f"rice{k:g}dB")
def rice(request):
    return unit_mean_spec("rice", request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
