import numpy as np
import pytest

from lqa import IsingProblem


def random_symmetric(n, rng, scale=1.0):
    """Dense symmetric zero-diagonal coupling matrix with U[-scale, scale] entries."""
    J = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    vals = rng.uniform(-scale, scale, size=len(iu[0]))
    J[iu] = vals
    J.T[iu] = vals
    return J


def random_ising(n, rng, scale=1.0):
    return IsingProblem(J=random_symmetric(n, rng, scale))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
