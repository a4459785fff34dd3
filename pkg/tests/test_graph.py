"""Complete-graph model: sign conventions, factorization, reduction."""
import numpy as np
import pytest

from edgesync.graph import complete_graph, edge_laplacian, node_to_edge, tree_to_edge
from edgesync.numerics import rk4_step


def test_two_agent_matrices():
    # worked out by hand from the tail=+1 / head=-1 convention
    m = complete_graph(2)
    assert [(lab.tail, lab.head) for lab in m.labels] == [(1, 2), (2, 1)]
    assert np.array_equal(m.incidence, [[1.0, -1.0], [-1.0, 1.0]])
    assert np.array_equal(m.in_incidence, [[0.0, -1.0], [-1.0, 0.0]])
    assert np.allclose(m.tree_to_cycle, [[-1.0]], atol=1e-12)
    assert np.allclose(m.reduction, [[1.0, -1.0]], atol=1e-12)


def test_sizes():
    m3 = complete_graph(3)
    assert m3.m == 6
    assert m3.tree_incidence.shape == (3, 2)
    assert m3.cycle_incidence.shape == (3, 4)
    assert complete_graph(6).m == 30  # matches the 30-entry benchmark weight vector


def test_rejects_single_agent():
    with pytest.raises(ValueError):
        complete_graph(1)


def test_canonical_labels_and_index():
    m = complete_graph(4)
    pairs = [(lab.tail, lab.head) for lab in m.labels]
    assert len(set(pairs)) == m.m
    assert pairs[:3] == [(1, 2), (1, 3), (1, 4)]  # star spanning tree first
    assert pairs[3:] == sorted(pairs[3:])  # remainder lexicographic
    for k, (tail, head) in enumerate(pairs):
        assert m.edge_index(tail, head) == k
    with pytest.raises(ValueError):
        m.edge_index(2, 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_incidence_structure(n):
    m = complete_graph(n)
    col_sums = m.incidence.sum(axis=0)
    assert np.all(col_sums == 0.0)
    assert np.all((m.incidence == 1.0).sum(axis=0) == 1)
    assert np.all((m.incidence == -1.0).sum(axis=0) == 1)
    assert np.all((m.in_incidence == -1.0).sum(axis=0) == 1)
    assert np.all((m.in_incidence != 0.0).sum(axis=0) == 1)
    # in-incidence -1 sits exactly at each edge's head
    for lab in m.labels:
        assert m.in_incidence[lab.head - 1, lab.index - 1] == -1.0


@pytest.mark.parametrize("n", range(2, 9))
def test_factorization_identities(n):
    m = complete_graph(n)
    assert np.array_equal(m.incidence[:, : n - 1], m.tree_incidence)
    assert np.array_equal(m.incidence[:, n - 1 :], m.cycle_incidence)
    assert np.allclose(m.reduction[:, : n - 1], np.eye(n - 1), atol=1e-12)
    assert np.allclose(m.reduction[:, n - 1 :], m.tree_to_cycle, atol=1e-12)
    assert np.max(np.abs(m.incidence - m.tree_incidence @ m.reduction)) < 1e-12


@pytest.mark.parametrize("n", range(2, 9))
def test_ranks(n):
    m = complete_graph(n)
    assert np.linalg.matrix_rank(m.incidence, tol=1e-10) == n - 1
    assert np.linalg.matrix_rank(m.tree_incidence.T @ m.in_incidence, tol=1e-10) == n - 1


@pytest.mark.parametrize("n", range(2, 9))
def test_edge_states_factor_through_tree(n):
    rng = np.random.default_rng(n)
    m = complete_graph(n)
    for _ in range(5):
        x = rng.normal(size=n)
        z = node_to_edge(m, x)
        z_tree = m.tree_incidence.T @ x
        assert np.linalg.norm(z - tree_to_edge(m, z_tree)) < 1e-12


def test_node_to_edge_values():
    m = complete_graph(2)
    assert np.array_equal(node_to_edge(m, np.array([1.0, 0.0])), [1.0, -1.0])
    m5 = complete_graph(5)
    assert np.allclose(node_to_edge(m5, 3.7 * np.ones(5)), 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        node_to_edge(m5, np.zeros(4))


def test_tree_to_edge_values():
    m = complete_graph(2)
    assert np.array_equal(tree_to_edge(m, np.array([0.0])), [0.0, 0.0])
    assert np.allclose(tree_to_edge(m, np.array([1.0])), [1.0, -1.0], atol=1e-12)
    with pytest.raises(ValueError):
        tree_to_edge(m, np.zeros(2))


def test_edge_laplacian_values():
    m = complete_graph(2)
    assert np.allclose(edge_laplacian(m, np.zeros(2)), [[0.0]], atol=1e-15)
    assert np.allclose(edge_laplacian(m, np.array([1.0, 0.0])), [[1.0]], atol=1e-12)
    assert np.allclose(edge_laplacian(m, np.array([1.0, 1.0])), [[2.0]], atol=1e-12)
    with pytest.raises(ValueError):
        edge_laplacian(m, np.zeros(3))


@pytest.mark.parametrize("n", range(2, 9))
def test_edge_laplacian_contracts_tree_states(n):
    # positive spectral abscissa is asserted dynamically: the linear flow
    # dz/dt = -L_e z must shrink over [0, 10] for a connected weighting
    rng = np.random.default_rng(40 + n)
    m = complete_graph(n)
    weights = rng.uniform(0.3, 1.0, size=m.m)
    le = edge_laplacian(m, weights)
    z = rng.normal(size=n - 1)
    z0 = np.linalg.norm(z)
    dt = 0.01
    for k in range(1000):
        z = rk4_step(lambda t, v: -le @ v, k * dt, z, dt)
    assert np.linalg.norm(z) < z0
