import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

P0_EXACT = 4 * 2 ** (1 / 3) / (3 + 4 * 2 ** (1 / 3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def axis_law(p: float) -> float:
    return max(0.0, (p - P0_EXACT) / (1.0 - P0_EXACT))


@pytest.fixture(scope="session")
def axis():
    return axis_law


@pytest.fixture(scope="session")
def p0():
    return P0_EXACT


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


TWO_PI_3 = 2 * math.pi / 3


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for cid in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[cid])
