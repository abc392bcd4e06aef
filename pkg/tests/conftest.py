import numpy as np
import pytest

from scmforest.dataset import Dataset


def make_dataset(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    names = names or [f"f{j}" for j in range(p)]
    return Dataset(X, y, [f"s{i}" for i in range(n)], names)


def random_dataset(rng, n_max=40, p_max=10, levels=None):
    """Small dataset with both classes; ``levels`` limits distinct values to force ties."""
    n = int(rng.integers(4, n_max + 1))
    p = int(rng.integers(1, p_max + 1))
    if levels:
        X = rng.integers(0, levels, size=(n, p)).astype(float)
    else:
        X = rng.normal(size=(n, p))
    y = rng.integers(0, 2, size=n)
    y[0], y[1] = 0, 1
    return make_dataset(X, y)


@pytest.fixture
def stump_data():
    return make_dataset([1, 2, 3, 10, 11, 12], [1, 1, 1, 0, 0, 0])


@pytest.fixture
def planted_pair():
    grid = np.array([[a, b] for a in (0, 1) for b in (0, 1)] * 2, dtype=float)
    return make_dataset(grid, (grid[:, 0] * grid[:, 1]).astype(int))
