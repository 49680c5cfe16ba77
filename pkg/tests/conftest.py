import numpy as np
import pytest
from hypothesis import settings

from cstarframes import load_descriptor, shipped_example

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def _load(name):
    return load_descriptor(shipped_example(name))


@pytest.fixture(scope="session")
def ex26():
    return _load("example_2_6")


@pytest.fixture(scope="session")
def ex27():
    return _load("example_2_7")


@pytest.fixture(scope="session")
def corpus():
    return _load
