import io
import math

import numpy as np
import pytest

from graphon_holder import sampler
from graphon_holder.graphons import Constant, DotProduct, Pullback, build


def test_complete_graph_when_p_is_one():
    g = sampler.sample_graph(build(Constant(1.0)), 5, seed=3)
    assert g.n_edges == 10
    assert sampler.edge_list_bytes(g).count(b"\n") == 11


def test_empty_graph_when_p_is_zero():
    g = sampler.sample_graph(build(Constant(0.0)), 40, seed=3)
    assert g.n_edges == 0
    assert sampler.edge_list_bytes(g) == b"# n=40\n"


def test_edge_list_fixtures():
    empty = sampler.SampledGraph(3, np.zeros((3, 1)), np.zeros((3, 3), bool), 0)
    tri = sampler.SampledGraph(3, np.zeros((3, 1)), ~np.eye(3, dtype=bool), 0)
    assert sampler.edge_list_bytes(empty) == b"# n=3\n"
    assert sampler.edge_list_bytes(tri) == b"# n=3\n0 1\n0 2\n1 2\n"
    k2 = sampler.sample_graph(build(Constant(1.0)), 2, seed=0)
    assert sampler.edge_list_bytes(k2) == b"# n=2\n0 1\n"


def test_write_edge_list_sinks(tmp_path):
    g = sampler.sample_graph(build(Constant(0.5)), 30, seed=1)
    path = tmp_path / "e.txt"
    n = sampler.write_edge_list(g, path)
    buf = io.BytesIO()
    assert sampler.write_edge_list(g, buf) == n
    assert path.read_bytes() == buf.getvalue() == sampler.edge_list_bytes(g)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_constant_density(p):
    n = 1000
    g = sampler.sample_graph(build(Constant(p)), n, seed=7)
    pairs = n * (n - 1) / 2
    assert abs(g.density - p) <= 3 * math.sqrt(p * (1 - p) / pairs)


def test_dot_product_density():
    # integral of x*y over the unit square is 1/4
    n = 1000
    g = sampler.sample_graph(build(DotProduct(1, 1.0)), n, seed=11)
    # latent fluctuation dominates: Var(mean degree-ish) ~ 4 Var(x/2) / n
    sigma = math.sqrt(4 * (1 / 12) * (1 / 4) / n + 0.25 * 0.75 / (n * (n - 1) / 2))
    assert abs(g.density - 0.25) <= 3 * sigma


def test_adjacency_shape():
    g = sampler.sample_graph(build(DotProduct(2, 0.5)), 300, seed=2)
    assert g.adjacency.dtype == bool
    assert np.array_equal(g.adjacency, g.adjacency.T)
    assert not g.adjacency.diagonal().any()
    e = g.edges()
    assert np.all(e[:, 0] < e[:, 1])


def test_chunking_does_not_change_sample():
    W = build(DotProduct(2, 0.5))
    a = sampler.sample_graph(W, 333, seed=4, chunk=256)
    b = sampler.sample_graph(W, 333, seed=4, chunk=17)
    assert sampler.edge_list_bytes(a) == sampler.edge_list_bytes(b)


def test_seed_changes_sample():
    W = build(Constant(0.5))
    a = sampler.sample_graph(W, 100, seed=1)
    b = sampler.sample_graph(W, 100, seed=2)
    assert sampler.edge_list_bytes(a) != sampler.edge_list_bytes(b)


def mean_degree_sigma(p, var_g, n):
    """sd of density: latent degree-function variance plus edge noise."""
    return math.sqrt(4 * var_g / n + p * (1 - p) / (n * (n - 1) / 2))


def test_pullback_mean_degree_invariance():
    # W = x.y / 2 on [0,1]^2: density 1/4, degree function g(x) = (x1 + x2) / 4
    n = 500
    W = build(DotProduct(2, 0.5))
    Wp = build(Pullback(DotProduct(2, 0.5), 20))
    sigma = mean_degree_sigma(1 / 4, 2 / 12 / 16, n)
    dens = [sampler.sample_graph(G, n, seed=s).density for G, s in ((W, 5), (Wp, 6))]
    assert abs(dens[0] - dens[1]) <= 3 * math.sqrt(2) * sigma
    assert all(abs(x - 1 / 4) <= 3 * sigma for x in dens)
