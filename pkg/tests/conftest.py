import numpy as np
import pytest

from gwcache.source_model import SourceSpec, make_structured_library

UNIT = SourceSpec(1200, 1200, 1200)


@pytest.fixture(scope="session")
def unit_library():
    return make_structured_library(UNIT, seed=1)


def random_bits(n, seed=0):
    return np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.uint8)


@pytest.fixture
def l2_descriptions():
    return {s: random_bits(1200, seed=i) for i, s in enumerate(("12", "13", "23"))}


@pytest.fixture
def l1_descriptions():
    return {s: random_bits(1200, seed=10 + i) for i, s in enumerate(("1", "2", "3"))}


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
