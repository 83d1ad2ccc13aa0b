import numpy as np
import pytest

from sublsq import Dataset


@pytest.fixture
def line_dataset():
    """Three exactly collinear points: y = 1 + x."""
    return Dataset(
        design=np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]),
        response=np.array([1.0, 2.0, 3.0]),
    )


def gaussian_dataset(seed, n, p, noise_sd=1.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta0 = rng.standard_normal(p)
    y = X @ beta0 + noise_sd * rng.standard_normal(n)
    return Dataset(design=X, response=y)
