import numpy as np
import pytest

from fjopinion.generate import random_connected_gnp
from fjopinion.graph import StubbornnessVector, build_graph


@pytest.fixture
def path2():
    """Two nodes joined by a unit-weight edge."""
    return build_graph([(0, 1, 1.0)])


@pytest.fixture
def k21():
    return StubbornnessVector.from_values([2.0, 1.0])


@pytest.fixture
def k11():
    return StubbornnessVector.from_values([1.0, 1.0])


def make_instance(rng, n_max=40, p=0.25, k_range=(0.5, 3.0)):
    """Seeded random connected weighted graph with stubbornness and opinions."""
    n = int(rng.integers(3, n_max + 1))
    g = random_connected_gnp(n, p, int(rng.integers(0, 2**31)))
    k = StubbornnessVector.from_values(rng.uniform(*k_range, size=g.n))
    s = rng.uniform(-1.0, 1.0, size=g.n)
    return g, k, s


def dense_laplacian(g):
    lap = np.zeros((g.n, g.n))
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        lap[u, v] -= w
        lap[v, u] -= w
        lap[u, u] += w
        lap[v, v] += w
    return lap
