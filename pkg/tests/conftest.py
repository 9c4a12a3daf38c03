import numpy as np
import pytest

from dpa_hybrid.rf import RfPhases
from dpa_hybrid.rng import TEST_INSTANCE, complex_normal, substream


def make_rng(seed=0, index=0):
    return substream(seed, 0, TEST_INSTANCE, index)


def random_phases(rng, n_subarrays, n_tx_sub, bits=None):
    return RfPhases(rng.uniform(0.0, 2.0 * np.pi, (n_subarrays, n_tx_sub)), bits)


def random_target(rng, n_tx, n_streams, power, K=None):
    """Complex Gaussian precoder(s) rescaled to ``||F||_F^2 = power``."""
    shape = (n_tx, n_streams) if K is None else (K, n_tx, n_streams)
    F = complex_normal(rng, shape)
    norms = np.linalg.norm(F, axis=(-2, -1), keepdims=True)
    return F * np.sqrt(power) / norms


@pytest.fixture
def rng():
    return make_rng(12345)
