import os

import numpy as np
import pytest
from hypothesis import settings

from flagquant.rootsys import build_root_system

settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

ALL_TYPES = ("A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2")
SMALL_TYPES = ("A1", "A2", "B2", "G2")


@pytest.fixture(scope="session")
def a1():
    return build_root_system("A1")


@pytest.fixture(scope="session")
def a2():
    return build_root_system("A2")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in RESULTS.values():
            terminalreporter.write_line(line)
