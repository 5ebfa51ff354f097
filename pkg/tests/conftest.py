import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from paratorus import Grid, make_partition


@pytest.fixture(scope="session")
def grid16():
    return Grid(16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(32)


@pytest.fixture(scope="session")
def grid64():
    return Grid(64)


@pytest.fixture(scope="session")
def part16(grid16):
    return make_partition(grid16)


@pytest.fixture(scope="session")
def part32(grid32):
    return make_partition(grid32)


@pytest.fixture(scope="session")
def part64(grid64):
    return make_partition(grid64)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
