"""Graph priors, evaluated as log unnormalised masses."""

import math
from functools import lru_cache

import numpy as np

from .graph import LabeledGraph


class GraphPrior:
    name = "prior"

    def log_unnorm(self, g: LabeledGraph) -> float:
        raise NotImplementedError

    def log_ratio(self, g_new: LabeledGraph, g_old: LabeledGraph) -> float:
        if g_new.p != g_old.p:
            raise ValueError("graphs have different node counts")
        return self.log_unnorm(g_new) - self.log_unnorm(g_old)

    def edge_weights(self, p: int):
        """Per-edge log weights if the prior factorises over edges, else None."""
        return None


class Uniform(GraphPrior):
    name = "uniform"

    def log_unnorm(self, g):
        return 0.0

    def log_ratio(self, g_new, g_old):
        if g_new.p != g_old.p:
            raise ValueError("graphs have different node counts")
        return 0.0

    def edge_weights(self, p):
        return np.zeros((p, p))


class Binomial(GraphPrior):
    """Each edge present independently with probability beta."""

    name = "binomial"

    def __init__(self, beta: float):
        if not 0 < beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        self.beta = float(beta)
        self.log_odds = math.log(beta) - math.log1p(-beta)

    def log_unnorm(self, g):
        m = len(g.edges)
        total = g.p * (g.p - 1) // 2
        return m * math.log(self.beta) + (total - m) * math.log1p(-self.beta)

    def log_ratio(self, g_new, g_old):
        if g_new.p != g_old.p:
            raise ValueError("graphs have different node counts")
        return (len(g_new.edges) - len(g_old.edges)) * self.log_odds

    def edge_weights(self, p):
        w = np.full((p, p), self.log_odds)
        np.fill_diagonal(w, 0.0)
        return w


@lru_cache(maxsize=None)
def forest_counts_by_size(p: int) -> tuple:
    """Number of labeled forests on p nodes with k edges, for k = 0..p-1.

    Counts forests by the component containing the lowest node: a
    component of size s holding that node can be picked in C(p-1, s-1)
    ways and spanned by s**(s-2) trees.
    """
    @lru_cache(maxsize=None)
    def by_components(n, c):
        if n == 0:
            return 1 if c == 0 else 0
        if c == 0:
            return 0
        total = 0
        for s in range(1, n + 1):
            trees = 1 if s <= 2 else s ** (s - 2)
            total += math.comb(n - 1, s - 1) * trees * by_components(n - s, c - 1)
        return total

    return tuple(by_components(p, p - k) for k in range(p))


class SizeBased(GraphPrior):
    """Every size equally likely, and graphs of one size equally likely.

    Supported for the forest and tree classes with p <= 7.
    """

    name = "size"

    def __init__(self, p: int, graph_class: str = "forest"):
        if graph_class not in ("forest", "tree"):
            raise ValueError("size-based prior needs graph_class forest or tree")
        if not 1 <= p <= 7:
            raise ValueError("size-based prior is supported only for p <= 7")
        self.p = p
        self.graph_class = graph_class
        if graph_class == "tree":
            self.counts = {p - 1: p ** (p - 2) if p >= 2 else 1}
        else:
            self.counts = dict(enumerate(forest_counts_by_size(p)))

    def log_unnorm(self, g):
        if g.p != self.p:
            raise ValueError("graph has p=%d, prior built for p=%d" % (g.p, self.p))
        k = len(g.edges)
        if k not in self.counts:
            raise ValueError("graph size %d outside the prior's class" % k)
        return -math.log(self.counts[k])


class HubEncouraging(GraphPrior):
    """Mass psi + sum_v max(0, deg(v) - chi): graphs with a node above chi are favoured."""

    name = "hub"

    def __init__(self, chi: int, psi: float = 1.0):
        if chi < 1:
            raise ValueError("chi must be at least 1")
        if not psi > 0:
            raise ValueError("psi must be positive")
        self.chi = int(chi)
        self.psi = float(psi)

    def log_unnorm(self, g):
        excess = sum(max(0, d - self.chi) for d in g.degrees())
        return math.log(self.psi + excess)


class MaxDegreeExp(GraphPrior):
    """log mass equal to the largest degree."""

    name = "maxdeg"

    def log_unnorm(self, g):
        return float(max(g.degrees()))


class Factored(GraphPrior):
    """Mass proportional to the product of per-edge weights exp(w[u, v])."""

    name = "factored"

    def __init__(self, weights):
        w = np.array(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.allclose(w, w.T, rtol=0, atol=1e-12):
            raise ValueError("weights must be symmetric")
        self.w = w

    def log_unnorm(self, g):
        if g.p != self.w.shape[0]:
            raise ValueError("weight matrix does not match p")
        return float(sum(self.w[u, v] for u, v in sorted(g.edges)))

    def log_ratio(self, g_new, g_old):
        if g_new.p != g_old.p:
            raise ValueError("graphs have different node counts")
        added = sorted(g_new.edges - g_old.edges)
        dropped = sorted(g_old.edges - g_new.edges)
        return float(sum(self.w[e] for e in added) - sum(self.w[e] for e in dropped))

    def edge_weights(self, p):
        if p != self.w.shape[0]:
            raise ValueError("weight matrix does not match p")
        return self.w.copy()


def log_prior_unnorm(prior: GraphPrior, g: LabeledGraph) -> float:
    return prior.log_unnorm(g)


def log_prior_ratio(prior: GraphPrior, g_new: LabeledGraph, g_old: LabeledGraph) -> float:
    return prior.log_ratio(g_new, g_old)


def is_factored(prior: GraphPrior, p: int):
    return prior.edge_weights(p)


def parse_prior(text: str, p: int) -> GraphPrior:
    """Parse a ``--prior`` flag value.

    Accepted forms: ``uniform``, ``binomial:<beta>``, ``hub:<chi>,<psi>``,
    ``hub`` (chi = floor(0.9 p), psi = 1), ``maxdeg``, ``factored:<csv path>``.
    """
    kind, _, arg = text.partition(":")
    if kind == "uniform":
        return Uniform()
    if kind == "binomial":
        return Binomial(float(arg))
    if kind == "hub":
        if arg:
            chi, _, psi = arg.partition(",")
            return HubEncouraging(int(chi), float(psi) if psi else 1.0)
        return HubEncouraging(max(1, int(0.9 * p)), 1.0)
    if kind == "maxdeg":
        return MaxDegreeExp()
    if kind == "factored":
        return Factored(np.loadtxt(arg, delimiter=",", ndmin=2))
    raise ValueError("unknown prior %r" % text)
