"""Complete-graph representation of an unknown directed topology.

An unknown, possibly time-varying directed graph on N nodes is represented
as the complete directed graph on those nodes, with one weight per ordered
pair: edges absent from the true graph simply carry weight zero.  Searching
for the topology then becomes estimating the M = N(N-1) edge weights.

Sign conventions.  A directed edge (i, j) means information flows from node
i (tail) to node j (head).  The incidence matrix carries +1 at the tail and
-1 at the head of each edge column, so the edge state z = E^T x satisfies
z_k = x_tail - x_head.  The in-incidence matrix carries -1 at the head only
and encodes which node consumes each edge signal.

Canonical edge ordering.  Edges (1,2), (1,3), ..., (1,N) come first and form
a star spanning tree; the remaining ordered pairs follow lexicographically
by (tail, head).  The first N-1 incidence columns are therefore always a
spanning-tree incidence matrix, which is what the reduced edge-agreement
model needs: with T = (E_T^T E_T)^{-1} E_T^T E_C and R = [I  T], the full
incidence factors as E = E_T R and the full edge state as z = R^T z_T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import pinv


@dataclass(frozen=True)
class EdgeLabel:
    """One directed edge of the complete graph, in canonical order.

    ``index`` is the 1-based position of the edge; ``tail`` and ``head``
    are 1-based node ids with information flowing tail -> head.
    """

    index: int
    tail: int
    head: int


@dataclass(frozen=True, eq=False)
class CompleteGraphModel:
    """All fixed matrices of the edge-agreement reduction for N agents.

    Immutable after construction (arrays are write-protected), so a single
    model can be shared freely across threads and simulation runs.
    """

    n: int
    m: int
    labels: tuple[EdgeLabel, ...]
    incidence: np.ndarray        # N x M, +1 at tail / -1 at head
    in_incidence: np.ndarray     # N x M, -1 at head only
    tree_incidence: np.ndarray   # N x (N-1), star spanning tree
    cycle_incidence: np.ndarray  # N x (M-N+1), remaining edges
    tree_to_cycle: np.ndarray    # (N-1) x (M-N+1)
    reduction: np.ndarray        # (N-1) x M, equals [I  tree_to_cycle]
    incidence_pinv: np.ndarray   # M x N

    def edge_index(self, tail: int, head: int) -> int:
        """0-based column index of directed edge (tail, head)."""
        if tail == head or not (1 <= tail <= self.n and 1 <= head <= self.n):
            raise ValueError(f"no edge ({tail}, {head}) in a complete graph on {self.n} nodes")
        if tail == 1:
            return head - 2
        return (self.n - 1) + (tail - 2) * (self.n - 1) + (head - 1 if head < tail else head - 2)


def _canonical_labels(n: int) -> tuple[EdgeLabel, ...]:
    pairs = [(1, j) for j in range(2, n + 1)]
    pairs += [(i, j) for i in range(2, n + 1) for j in range(1, n + 1) if j != i]
    return tuple(EdgeLabel(k + 1, i, j) for k, (i, j) in enumerate(pairs))


def complete_graph(n: int) -> CompleteGraphModel:
    """Build the complete-graph model for ``n`` agents (n >= 2)."""
    if n < 2:
        raise ValueError(f"a network needs at least 2 agents, got n={n}")
    labels = _canonical_labels(n)
    m = n * (n - 1)

    incidence = np.zeros((n, m))
    in_incidence = np.zeros((n, m))
    for lab in labels:
        k = lab.index - 1
        incidence[lab.tail - 1, k] = 1.0
        incidence[lab.head - 1, k] = -1.0
        in_incidence[lab.head - 1, k] = -1.0

    tree = incidence[:, : n - 1]
    cycle = incidence[:, n - 1 :]
    gram = tree.T @ tree  # (N-1) x (N-1), well conditioned for a star tree
    tree_to_cycle = pinv(gram) @ (tree.T @ cycle)
    reduction = np.hstack([np.eye(n - 1), tree_to_cycle])
    incidence_pinv = pinv(incidence)

    for arr in (incidence, in_incidence, tree, cycle, tree_to_cycle, reduction, incidence_pinv):
        arr.setflags(write=False)
    return CompleteGraphModel(
        n=n,
        m=m,
        labels=labels,
        incidence=incidence,
        in_incidence=in_incidence,
        tree_incidence=tree,
        cycle_incidence=cycle,
        tree_to_cycle=tree_to_cycle,
        reduction=reduction,
        incidence_pinv=incidence_pinv,
    )


def edge_laplacian(model: CompleteGraphModel, weights: np.ndarray) -> np.ndarray:
    """Edge Laplacian E_T^T E_in diag(w) R^T governing the reduced edge dynamics.

    For a connected weighted graph its eigenvalues have positive real parts,
    which is what makes the reduced consensus dynamics contract.  The matrix
    itself is generally not symmetric.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (model.m,):
        raise ValueError(f"expected {model.m} edge weights, got shape {weights.shape}")
    return model.tree_incidence.T @ (model.in_incidence * weights[None, :]) @ model.reduction.T


def node_to_edge(model: CompleteGraphModel, x: np.ndarray) -> np.ndarray:
    """Edge states z = E^T x, i.e. z_k = x_tail(k) - x_head(k)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise ValueError(f"expected {model.n} node states, got shape {x.shape}")
    return model.incidence.T @ x


def tree_to_edge(model: CompleteGraphModel, z_tree: np.ndarray) -> np.ndarray:
    """Expand spanning-tree edge states to all edges via z = R^T z_T."""
    z_tree = np.asarray(z_tree, dtype=float)
    if z_tree.shape != (model.n - 1,):
        raise ValueError(f"expected {model.n - 1} tree-edge states, got shape {z_tree.shape}")
    return model.reduction.T @ z_tree
