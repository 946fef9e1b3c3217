"""Hyper-inverse-Wishart marginal likelihoods for forests and decomposable graphs.

For a node set C the normalising function is

    k(C, delta, D) = |D_C / 2|^((delta + |C| - 1) / 2) / Gamma_|C|((delta + |C| - 1) / 2)

and the posterior-to-prior ratio K(C) = k(C, delta, D) / k(C, delta + n, D + U)
is the building block of every marginal likelihood below.
"""

import math

import numpy as np

from .graph import LabeledGraph, is_forest
from .numerics import as_dataset, cholesky_logdet, log_multigamma

LOG_2PI = math.log(2.0 * math.pi)


class HiwParams:
    """Prior hyperparameters (delta, D).  ``d`` defaults to (delta + 2) I."""

    def __init__(self, p: int, delta: float = 3.0, d=None):
        if not delta > 2:
            raise ValueError("delta must exceed 2 for a proper prior, got %g" % delta)
        if d is None:
            d = (delta + 2.0) * np.eye(p)
        d = np.array(d, dtype=float)
        if d.shape != (p, p):
            raise ValueError("D must be %d x %d" % (p, p))
        if not np.allclose(d, d.T, rtol=0, atol=1e-12):
            raise ValueError("D must be symmetric")
        cholesky_logdet(d)
        self.p = p
        self.delta = float(delta)
        self.d = d


class SuffStats:
    """Sufficient statistics (n, U = X^T X) of a zero-mean Gaussian sample."""

    def __init__(self, n: int, u):
        u = np.array(u, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("U must be square")
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = int(n)
        self.u = 0.5 * (u + u.T)
        self.p = u.shape[0]

    @classmethod
    def from_data(cls, x, center: bool = False):
        x = as_dataset(x)
        if center and x.shape[0] > 0:
            x = x - x.mean(axis=0)
        return cls(x.shape[0], x.T @ x)

    @classmethod
    def empty(cls, p: int):
        return cls(0, np.zeros((p, p)))


def log_k(nodes, delta: float, d) -> float:
    """log k(C, delta, D) for the node set C."""
    idx = sorted(nodes)
    c = len(idx)
    if c == 0:
        raise ValueError("log_k of the empty set is not defined; empty separators contribute 0")
    sub = np.asarray(d, dtype=float)[np.ix_(idx, idx)] / 2.0
    _, logdet = cholesky_logdet(sub)
    a = (delta + c - 1) / 2.0
    return a * logdet - log_multigamma(c, a)


class HiwModel:
    """Hyperparameters plus data, with memoised log K ratios keyed by sorted node tuple."""

    def __init__(self, params: HiwParams, stats: SuffStats):
        if params.p != stats.p:
            raise ValueError("params and stats disagree on p")
        self.params = params
        self.stats = stats
        self.p = params.p
        self.n = stats.n
        self._post_delta = params.delta + stats.n
        self._post_d = params.d + stats.u
        self._cache = {}
        self._edge_w = None
        self._node_total = None

    def log_k_ratio(self, nodes) -> float:
        key = tuple(sorted(nodes))
        val = self._cache.get(key)
        if val is None:
            val = log_k(key, self.params.delta, self.params.d) - log_k(key, self._post_delta, self._post_d)
            self._cache[key] = val
        return val

    def node_term(self) -> float:
        """-(np/2) log 2 pi + sum_v log K(v): the log marginal of the empty graph."""
        if self._node_total is None:
            total = -0.5 * self.n * self.p * LOG_2PI
            for v in range(self.p):
                total += self.log_k_ratio((v,))
            self._node_total = total
        return self._node_total

    def edge_log_weights(self):
        """Symmetric matrix w with w[u, v] = log K(u,v) - log K(u) - log K(v); zero diagonal."""
        if self._edge_w is None:
            p = self.p
            w = np.zeros((p, p))
            single = [self.log_k_ratio((v,)) for v in range(p)]
            for u in range(p):
                for v in range(u + 1, p):
                    w[u, v] = w[v, u] = self.log_k_ratio((u, v)) - single[u] - single[v]
            self._edge_w = w
        return self._edge_w

    def log_marginal_forest(self, g: LabeledGraph, check: bool = True) -> float:
        if check and not is_forest(g):
            raise ValueError("graph is not a forest")
        w = self.edge_log_weights()
        total = self.node_term()
        for u, v in sorted(g.edges):
            total += float(w[u, v])
        return total

    def log_marginal_decomposable(self, g: LabeledGraph) -> float:
        from .chordal import clique_separator_decomposition

        dec = clique_separator_decomposition(g)
        total = -0.5 * self.n * self.p * LOG_2PI
        for c in dec.cliques:
            total += self.log_k_ratio(c)
        for s in dec.separators:
            if s:
                total -= self.log_k_ratio(s)
        return total

    def log_h(self, nodes, sigma_block, x_block_u=None) -> float:
        """log of IW(Sigma_A; delta, D_A) * N(x_A; Sigma_A) for a node set A.

        ``sigma_block`` is the |A| x |A| covariance block.  Returns -inf
        when it is not positive definite.
        """
        idx = list(nodes)
        c = len(idx)
        try:
            factor, logdet = cholesky_logdet(sigma_block)
        except Exception:
            return -math.inf
        inv = np.linalg.inv(sigma_block)
        d_a = self.params.d[np.ix_(idx, idx)]
        u_a = self.stats.u[np.ix_(idx, idx)] if x_block_u is None else x_block_u
        delta = self.params.delta
        log_iw = log_k(idx, delta, self.params.d) - (delta + 2 * c) / 2.0 * logdet - 0.5 * float(np.sum(d_a * inv))
        log_n = -0.5 * self.n * c * LOG_2PI - 0.5 * self.n * logdet - 0.5 * float(np.sum(u_a * inv))
        return log_iw + log_n


def log_k_ratio(nodes, params: HiwParams, stats: SuffStats) -> float:
    return HiwModel(params, stats).log_k_ratio(nodes)


def log_marginal_forest(g: LabeledGraph, params: HiwParams, stats: SuffStats) -> float:
    return HiwModel(params, stats).log_marginal_forest(g)


def log_marginal_decomposable(g: LabeledGraph, params: HiwParams, stats: SuffStats) -> float:
    return HiwModel(params, stats).log_marginal_decomposable(g)


def edge_log_weight_matrix(params: HiwParams, stats: SuffStats):
    return HiwModel(params, stats).edge_log_weights().copy()
