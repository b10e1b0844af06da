import pytest

from coordsketch.core import build_coordinated_from
from coordsketch.datasets import four_set_fixture

from .helpers import random_collection


@pytest.fixture
def fixture4():
    """Ten-key, four-set PRI fixture and its k=3 sketches."""
    collection, assignment = four_set_fixture()
    return collection, assignment, build_coordinated_from(collection, assignment, 3)


@pytest.fixture
def small_collection():
    return random_collection(7)


def pytest_terminal_summary(terminalreporter):
    from .helpers import ACCEPTANCE_LOG

    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
