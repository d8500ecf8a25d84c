import numpy as np
import pytest

from matprodlab import ensembles
from matprodlab.linalg import spectral_norm


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_matrix(rng, d, norm=None):
    """Dense Gaussian matrix, optionally rescaled to a target spectral norm."""
    m = rng.normal(size=(d, d))
    if norm is not None:
        current = spectral_norm(m)
        if current == 0.0:
            m = np.eye(d)
            current = 1.0
        m = m * (norm / current)
    return m


def mixed_ensemble(rng, index, d, seed):
    """Rotate through the four ensemble kinds for varied test inputs."""
    which = index % 4
    if which == 0:
        a = random_matrix(rng, d, norm=0.8)
        b = random_matrix(rng, d, norm=0.5)
        return ensembles.two_point(a, b, seed=seed)
    if which == 1:
        x0 = random_matrix(rng, d, norm=0.4)
        b = random_matrix(rng, d, norm=0.3)
        return ensembles.sign_perturbation(x0, b, seed=seed)
    if which == 2:
        return ensembles.rank_one_sphere(d, 1.0, seed=seed)
    return ensembles.scalar_uniform(-1.0, 1.0, seed=seed)
