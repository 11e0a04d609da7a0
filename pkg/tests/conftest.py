import math

import numpy as np
import pytest
from hypothesis import settings

from dgbo_lab.damping import build_profile, compute_ck
from dgbo_lab.params import ModelParams

settings.register_profile("lab", max_examples=25, deadline=None)
settings.load_profile("lab")

QUARTER = (0.0, math.pi / 2)


@pytest.fixture(scope="session")
def bump16():
    """Smooth bump on [0, pi/2], K = 16, beta = 0.8."""
    return compute_ck(build_profile("smooth_bump", QUARTER, K=16), 0.8)


@pytest.fixture(scope="session")
def bump8():
    return compute_ck(build_profile("smooth_bump", QUARTER, K=8), 0.8)


@pytest.fixture(scope="session")
def linear_params():
    return ModelParams(1.5, 0.8, linear=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
