"""Maximum-weight spanning trees and forests, and MAP forest/tree selection."""

from dataclasses import dataclass

import numpy as np

from .graph import LabeledGraph
from .hiw import HiwModel, HiwParams, SuffStats
from .numerics import as_dataset

RHO2_CAP = 1.0 - 1e-12


@dataclass
class WeightedEdgeList:
    p: int
    items: list  # (u, v, weight) with u < v

    @classmethod
    def from_matrix(cls, w):
        w = np.asarray(w, dtype=float)
        p = w.shape[0]
        return cls(p, [(u, v, float(w[u, v])) for u in range(p) for v in range(u + 1, p)])

    def matrix(self):
        w = np.zeros((self.p, self.p))
        for u, v, x in self.items:
            w[u, v] = w[v, u] = x
        return w


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        self.parent[y] = x
        if self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        return True


def _kruskal(p, items):
    order = sorted(((-w, min(u, v), max(u, v)) for u, v, w in items))
    uf = UnionFind(p)
    chosen = []
    for _, u, v in order:
        if uf.union(u, v):
            chosen.append((u, v))
            if len(chosen) == p - 1:
                break
    return LabeledGraph(p, chosen)


def kruskal_max_tree(w: WeightedEdgeList) -> LabeledGraph:
    """Maximum-weight spanning tree; equal weights resolved in lexicographic edge order."""
    if w.p < 1:
        raise ValueError("p must be positive")
    t = _kruskal(w.p, w.items)
    if len(t.edges) != w.p - 1:
        raise ValueError("the weighted edges do not connect all nodes")
    return t


def kruskal_max_forest(w: WeightedEdgeList) -> LabeledGraph:
    """Maximum-weight forest: Kruskal restricted to strictly positive weights."""
    return _kruskal(w.p, [(u, v, x) for u, v, x in w.items if x > 0])


def chow_liu_gaussian_weights(x) -> WeightedEdgeList:
    """Gaussian mutual information -1/2 log(1 - rho^2) for every pair of columns."""
    x = as_dataset(x)
    n, p = x.shape
    if n < 2:
        raise ValueError("need at least two observations")
    xc = x - x.mean(axis=0)
    ss = np.sum(xc * xc, axis=0)
    if np.any(ss <= 0):
        raise ValueError("a column has zero variance")
    s = xc / np.sqrt(ss)
    rho = s.T @ s
    rho2 = np.minimum(rho * rho, RHO2_CAP)
    mi = -0.5 * np.log1p(-rho2)
    return WeightedEdgeList(p, [(u, v, float(mi[u, v])) for u in range(p) for v in range(u + 1, p)])


def posterior_edge_weights(params: HiwParams, stats: SuffStats, prior, model: HiwModel = None):
    """Marginal-likelihood edge log weights plus the prior's per-edge log weights."""
    pw = prior.edge_weights(params.p)
    if pw is None:
        raise ValueError("prior %r does not factorise over edges" % prior.name)
    if model is None:
        model = HiwModel(params, stats)
    return model.edge_log_weights() + pw


def map_forest(params: HiwParams, stats: SuffStats, prior) -> LabeledGraph:
    return kruskal_max_forest(WeightedEdgeList.from_matrix(posterior_edge_weights(params, stats, prior)))


def map_tree(params: HiwParams, stats: SuffStats, prior) -> LabeledGraph:
    return kruskal_max_tree(WeightedEdgeList.from_matrix(posterior_edge_weights(params, stats, prior)))
