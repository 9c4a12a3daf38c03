"""Reproducible random substreams.

A master seed expands into independent generators addressed by
``(trial, purpose, index)``. The address is passed as the ``spawn_key`` of a
:class:`numpy.random.SeedSequence`, so each substream is a pure function of
the master seed and its address: trials and subarrays can be generated in any
order (or in parallel) and still reproduce bit for bit.
"""

import numpy as np

SUBARRAY = 0
CSI_ERROR = 1
TEST_INSTANCE = 2


def substream(seed, trial=0, purpose=SUBARRAY, index=0):
    """Return the generator for one addressed substream of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial), int(purpose), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def complex_normal(rng, shape):
    """Draw i.i.d. unit-variance circularly-symmetric complex Gaussians."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
