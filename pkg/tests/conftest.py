import numpy as np
import pytest

from twophaselab import ModelParams, far_field_from_plus
from twophaselab.acceptance import warm_kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_numba():
    # compile the integrator kernels once, outside any timed assertion
    warm_kernels()


@pytest.fixture(scope="session")
def base_params():
    return ModelParams(A1=1.0, A2=1.0, gamma=1.0, alpha=1.0, mu=1.0)


@pytest.fixture(scope="session")
def sonic_far():
    return far_field_from_plus(1.0, 1.0, 1.0, 1.0 - 1e-3)


@pytest.fixture(scope="session")
def subsonic_far():
    return far_field_from_plus(1.0, 1.0, 0.5, 0.5 - 1e-3)


@pytest.fixture(scope="session")
def supersonic_far():
    return far_field_from_plus(1.0, 1.0, 2.0, 2.0 - 1e-3)


def random_valid_params(rng):
    A1, A2 = np.exp(rng.uniform(np.log(0.2), np.log(5.0), 2))
    g, al = rng.uniform(1.0, 3.0, 2)
    mu = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
    rp, np_ = np.exp(rng.uniform(np.log(0.2), np.log(5.0), 2))
    up = float(np.exp(rng.uniform(np.log(0.1), np.log(5.0))))
    params = ModelParams(A1=float(A1), A2=float(A2), gamma=float(g),
                         alpha=float(al), mu=mu)
    far = far_field_from_plus(float(rp), float(np_), up, up)
    return params, far
