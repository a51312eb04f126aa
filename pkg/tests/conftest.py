import numpy as np
import pytest

from plval import plfunction as pf
from plval import polytope as pt


@pytest.fixture
def square():
    return pt.cube(2)


@pytest.fixture
def cone_square(square):
    return pf.cone_function(square)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
