import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def random_conductivity(rng, scale=3.0):
    """Random 3x3 conductivity with positive definite symmetric part."""
    B = rng.normal(size=(3, 3))
    sym = B @ B.T + 0.2 * np.eye(3)
    W = rng.normal(size=(3, 3)) * scale
    return sym + 0.5 * (W - W.T)
