"""Exact computations for distributions over spanning trees of the form
P(T) proportional to prod_{e in T} w_e, via the weighted matrix-tree theorem.
"""

from dataclasses import dataclass
import math
import random

import numpy as np

from .graph import LabeledGraph
from .numerics import NotPositiveDefinite, cholesky_logdet

FORBIDDEN = -1e300


class DisconnectedSupport(ValueError):
    """No spanning tree has positive weight."""


class FactoredTreeDist:
    """Symmetric matrix of log edge weights; -inf or FORBIDDEN removes an edge."""

    def __init__(self, lw):
        lw = np.array(lw, dtype=float)
        if lw.ndim != 2 or lw.shape[0] != lw.shape[1]:
            raise ValueError("log weights must be a square matrix")
        if np.any(np.isnan(lw)) or np.any(lw == np.inf):
            raise ValueError("log weights must be finite or -inf")
        if not np.array_equal(lw, lw.T):
            raise ValueError("log weights must be symmetric")
        self.p = lw.shape[0]
        self.lw = lw

    def scaled_weights(self):
        """exp(lw - m) with m the largest allowed log weight; returns (weights, m)."""
        off = ~np.eye(self.p, dtype=bool)
        vals = self.lw[off]
        allowed = vals[vals > FORBIDDEN / 2]
        if allowed.size == 0:
            raise DisconnectedSupport("every edge is forbidden")
        m = float(allowed.max())
        w = np.where(self.lw > FORBIDDEN / 2, np.exp(np.minimum(self.lw - m, 0.0)), 0.0)
        np.fill_diagonal(w, 0.0)
        return w, m

    def log_weight(self, t: LabeledGraph) -> float:
        return float(sum(self.lw[u, v] for u, v in sorted(t.edges)))


@dataclass
class TreePosteriorSummary:
    log_z: float
    edge_prob: np.ndarray
    expected_degree: np.ndarray


def _minor(w):
    lap = np.diag(w.sum(axis=1)) - w
    return lap[1:, 1:]


def log_partition(d: FactoredTreeDist) -> float:
    """log of the sum over spanning trees of the product of edge weights."""
    if d.p < 2:
        raise ValueError("need p >= 2")
    w, m = d.scaled_weights()
    try:
        _, logdet = cholesky_logdet(_minor(w))
    except NotPositiveDefinite as exc:
        raise DisconnectedSupport("weights do not connect all nodes") from exc
    return logdet + (d.p - 1) * m


def edge_probabilities(d: FactoredTreeDist) -> TreePosteriorSummary:
    """Inclusion probability of each edge in a random tree from d.

    With L the scaled Laplacian and B the inverse of L with node 0's row
    and column removed, P(u,v in T) = w_uv (B_uu + B_vv - 2 B_uv), terms
    involving node 0 being zero.
    """
    p = d.p
    if p < 2:
        raise ValueError("need p >= 2")
    w, m = d.scaled_weights()
    try:
        factor, logdet = cholesky_logdet(_minor(w))
    except NotPositiveDefinite as exc:
        raise DisconnectedSupport("weights do not connect all nodes") from exc
    inv_minor = np.linalg.inv(factor)
    inv_minor = inv_minor.T @ inv_minor
    b = np.zeros((p, p))
    b[1:, 1:] = inv_minor
    diag = np.diag(b)
    prob = w * (diag[:, None] + diag[None, :] - 2.0 * b)
    prob = np.clip(0.5 * (prob + prob.T), 0.0, 1.0)
    np.fill_diagonal(prob, 0.0)
    return TreePosteriorSummary(logdet + (p - 1) * m, prob, prob.sum(axis=1))


def expected_true_positives(s: TreePosteriorSummary, truth: LabeledGraph):
    """Expected number of true edges in a random tree, and that number over |E_truth|."""
    if truth.p != s.edge_prob.shape[0]:
        raise ValueError("truth graph has the wrong number of nodes")
    etp = float(sum(s.edge_prob[u, v] for u, v in sorted(truth.edges)))
    if not truth.edges:
        raise ValueError("expected true-positive rate undefined for an empty truth graph")
    return etp, etp / len(truth.edges)


def sample_tree(d: FactoredTreeDist, seed) -> LabeledGraph:
    """Exact draw by loop-erased random walks rooted at node 0.

    The walk moves from u to v with probability proportional to w_uv.
    """
    p = d.p
    if p == 1:
        return LabeledGraph(1)
    w, _ = d.scaled_weights()
    cum = np.cumsum(w, axis=1)
    if np.any(cum[:, -1] <= 0):
        raise DisconnectedSupport("a node has no allowed edges")
    rng = random.Random(seed)
    in_tree = [False] * p
    in_tree[0] = True
    nxt = [-1] * p
    for start in range(1, p):
        u = start
        steps = 0
        while not in_tree[u]:
            row = cum[u]
            nxt[u] = int(np.searchsorted(row, rng.random() * row[-1], side="right"))
            u = nxt[u]
            steps += 1
            if steps > 10_000_000:
                raise DisconnectedSupport("random walk failed to reach the tree")
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return LabeledGraph(p, [(v, nxt[v]) for v in range(1, p)])
