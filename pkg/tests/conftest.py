import os

import pytest
from hypothesis import HealthCheck, settings

from crnx.parser import parse_network

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

QUARTIC = "A <-> 2A : 1, 2\n2A <-> 3A : 7, 4\n3A <-> 4A : 6, 1\n4A -> 5A : 1\n"
CUBIC = "A <-> 2A : 1, 2\n2A <-> 3A : 3, 1\n3A -> 4A : 1\n"
ACR = "0 <-> A : 1, 1\nA + B <-> 3B : 1, 1\n"
SWITCHING = "0 <-> A : 1, 1\nA <-> B : 1, 1\n2C -> 3C : 1\n3C + A -> 2C + A : 1\n"
LINKED = "0 <-> A : 1, 1\nA <-> B : 1, 1\n"
IMMIGRATION = "0 <-> A : 1, 1\n"

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quartic():
    return parse_network(QUARTIC)


@pytest.fixture(scope="session")
def cubic():
    return parse_network(CUBIC)


@pytest.fixture(scope="session")
def acr():
    return parse_network(ACR)


@pytest.fixture(scope="session")
def switching():
    return parse_network(SWITCHING)


@pytest.fixture(scope="session")
def linked():
    return parse_network(LINKED)


@pytest.fixture(scope="session")
def immigration():
    return parse_network(IMMIGRATION)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
