import numpy as np
import pytest
from scipy.stats import skew

from fjopinion.errors import GraphInputError
from fjopinion.generate import (
    DISTRIBUTIONS,
    generate_opinions,
    generate_stubbornness,
    random_connected_gnp,
    random_gnp_graph,
    random_regular_graph,
)


@pytest.mark.parametrize("dist", DISTRIBUTIONS)
def test_values_in_range(dist):
    s = generate_opinions(5000, dist, seed=1)
    assert s.min() >= -1.0 and s.max() <= 1.0


@pytest.mark.parametrize("dist", DISTRIBUTIONS)
def test_same_seed_same_vector(dist):
    assert np.array_equal(generate_opinions(200, dist, 42), generate_opinions(200, dist, 42))


def test_different_seed_differs():
    assert not np.array_equal(
        generate_opinions(200, "uniform", 1), generate_opinions(200, "uniform", 2)
    )


def test_uniform_mean_near_zero():
    s = generate_opinions(100_000, "uniform", 3)
    assert abs(s.mean()) < 0.02


def test_powerlaw_positive_skew():
    s = generate_opinions(100_000, "powerlaw", 5)
    assert skew(s) > 0.0


def test_unknown_distribution():
    with pytest.raises(GraphInputError):
        generate_opinions(10, "cauchy", 0)


def test_stubbornness_range_and_determinism():
    k1 = generate_stubbornness(100, 0.5, 2.0, 9)
    k2 = generate_stubbornness(100, 0.5, 2.0, 9)
    assert np.array_equal(k1.k, k2.k)
    assert k1.k_min >= 0.5 and k1.k_max <= 2.0
    with pytest.raises(GraphInputError):
        generate_stubbornness(10, 0.0, 1.0, 0)


def test_regular_graph_near_regular():
    g = random_regular_graph(500, 4, seed=2)
    assert g.n == 500
    assert g.degrees.max() <= 4
    assert g.degrees.mean() > 3.5  # few stubs lost to loops/parallels


def test_gnp_graphs_seeded():
    g1 = random_gnp_graph(40, 0.2, 8)
    g2 = random_gnp_graph(40, 0.2, 8)
    assert g1.fingerprint() == g2.fingerprint()


def test_connected_gnp_is_connected():
    import scipy.sparse.csgraph as csgraph

    g = random_connected_gnp(30, 0.1, 4)
    n_comp, _ = csgraph.connected_components(g.adjacency, directed=False)
    assert n_comp == 1
