"""Posterior exploration over forests and trees.

Two explorers are provided:

* stochastic shotgun search (SSS): at each step score ``omega`` distinct
  neighbours of the current graph, keep every score in a ledger, and move to
  one neighbour chosen with probability proportional to its posterior mass;
* reversible-jump MCMC over (graph, incomplete covariance) pairs, where the
  covariance only holds the diagonal and the entries on edges.

Scores are log marginal likelihood plus log unnormalised prior.
"""

from dataclasses import dataclass, field
import math
import random
import time

import numpy as np

from .graph import LabeledGraph, is_forest, is_tree
from .hiw import LOG_2PI, HiwModel, HiwParams, SuffStats, log_k
from .movestore import ForestMove, ForestStore, TreeMove, TreeStore, propose_moves
from .priors import GraphPrior, Uniform

CLASSES = ("forest", "tree")
CLOCK_CHECK_EVERY = 64


class Model:
    """HIW marginal likelihood plus graph prior, with scores memoised by bit-pattern."""

    def __init__(self, params: HiwParams, stats: SuffStats, prior: GraphPrior = None):
        self.params = params
        self.stats = stats
        self.prior = prior if prior is not None else Uniform()
        self.hiw = HiwModel(params, stats)
        self.p = params.p
        self._memo = {}
        self.evaluations = 0

    def score_uncached(self, g: LabeledGraph) -> float:
        return self.hiw.log_marginal_forest(g, check=False) + self.prior.log_unnorm(g)

    def score_bits(self, bits: int) -> float:
        val = self._memo.get(bits)
        if val is None:
            val = self.score(LabeledGraph.from_bits(self.p, bits))
        return val

    def score(self, g: LabeledGraph) -> float:
        key = g.bits
        val = self._memo.get(key)
        if val is None:
            self.evaluations += 1
            val = self.score_uncached(g)
            self._memo[key] = val
        return val


def score(g: LabeledGraph, params: HiwParams, stats: SuffStats, prior: GraphPrior = None) -> float:
    """Log unnormalised posterior of a forest."""
    if not is_forest(g):
        raise ValueError("score is defined for forests only")
    return Model(params, stats, prior).score_uncached(g)


@dataclass
class SssConfig:
    omega: int = None  # None scores every neighbour
    iterations: int = 100
    seconds: float = None
    system: str = "A"
    seed: int = 0
    alpha: float = 1.0
    top: int = 10

    def __post_init__(self):
        if self.omega is not None and self.omega < 1:
            raise ValueError("omega must be at least 1")


@dataclass
class McmcConfig:
    sigma_g: float = 0.3
    sigma_ij: float = 0.01
    iterations: int = 1000
    seconds: float = None
    system: str = "A"
    seed: int = 0
    top: int = 10

    def __post_init__(self):
        if not (self.sigma_g > 0 and self.sigma_ij > 0):
            raise ValueError("sigma_g and sigma_ij must be positive")


@dataclass
class PosteriorRecord:
    """Visited graphs of one run.

    ``kind`` is "score" (ledger maps bit-pattern to log posterior) or
    "count" (ledger maps bit-pattern to visit count).
    """

    p: int
    graph_class: str
    kind: str
    ledger: dict
    trace: list = field(default_factory=list)
    best: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def log_weights(self):
        """Bit-patterns and their normalised log probabilities, in ascending bit order."""
        if not self.ledger:
            raise ValueError("empty ledger")
        keys = sorted(self.ledger)
        if self.kind == "score":
            vals = np.array([self.ledger[k] for k in keys], dtype=float)
        else:
            vals = np.log(np.array([self.ledger[k] for k in keys], dtype=float))
        m = vals.max()
        logz = m + math.log(float(np.sum(np.exp(vals - m))))
        return keys, vals - logz

    def top_graphs(self, k=None):
        k = self.info.get("top", 10) if k is None else k
        items = sorted(self.ledger.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        return [(LabeledGraph.from_bits(self.p, b), v) for b, v in items]


def _budget_done(it, cfg, start):
    if cfg.seconds is not None:
        if it % CLOCK_CHECK_EVERY == 0 and time.perf_counter() - start >= cfg.seconds:
            return True
        return False
    return it >= cfg.iterations


def _make_store(graph_class, start):
    if graph_class == "tree":
        if not is_tree(start):
            raise ValueError("start graph is not a tree")
        return TreeStore(start)
    if graph_class == "forest":
        if not is_forest(start):
            raise ValueError("start graph is not a forest")
        return ForestStore(start)
    raise ValueError("graph class must be forest or tree")


def _neighbour(store, edges, move):
    if isinstance(move, TreeMove):
        new = set(edges)
        new.discard(move.removed)
        new.add(move.added)
        return LabeledGraph(store.p, new)
    pair = (min(move.u, move.v), max(move.u, move.v))
    return LabeledGraph(store.p, edges ^ {pair})


def sss_run(graph_class: str, start: LabeledGraph, cfg: SssConfig, model: Model) -> PosteriorRecord:
    """Stochastic shotgun search.

    Each step proposes ``omega`` distinct moves (all of them when omega is
    None or exceeds the number available), scores every neighbour not yet
    in the ledger, and moves to a neighbour drawn with probability
    proportional to exp(alpha * score).  Candidates are ordered by
    bit-pattern before the draw so results depend only on the seed.
    """
    rng = random.Random(cfg.seed)
    store = _make_store(graph_class, start)
    ledger = {store.bits: model.score(start)}
    trace = [ledger[store.bits]]
    current = set(start.edges)
    it = 0
    t0 = time.perf_counter()
    while not _budget_done(it, cfg, t0):
        it += 1
        if isinstance(store, TreeStore):
            available = store.count_moves()
        else:
            available = store.n_addable() + store.n_existing()
        if available == 0:
            break
        omega = None if cfg.omega is None or cfg.omega >= available else cfg.omega
        moves = propose_moves(store, cfg.system, omega, rng)
        cands = []
        for m in moves:
            b = store.neighbour_bits(m)
            if b not in ledger:
                ledger[b] = model.score(_neighbour(store, current, m))
            cands.append((b, m))
        cands.sort(key=lambda bm: bm[0])
        logits = np.array([cfg.alpha * ledger[b] for b, _ in cands])
        probs = np.exp(logits - logits.max())
        cum = np.cumsum(probs)
        j = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        j = min(j, len(cands) - 1)
        b, m = cands[j]
        if isinstance(m, TreeMove):
            current.discard(m.removed)
            current.add(m.added)
        else:
            current ^= {(min(m.u, m.v), max(m.u, m.v))}
        store.apply(m)
        trace.append(ledger[b])
    rec = PosteriorRecord(store.p, graph_class, "score", ledger, trace)
    rec.info = {
        "iterations": it,
        "seconds": time.perf_counter() - t0,
        "budget": "seconds" if cfg.seconds is not None else "iterations",
        "top": cfg.top,
    }
    rec.best = rec.top_graphs(cfg.top)
    return rec


# -- MCMC ------------------------------------------------------------------


class IncompleteCov:
    """Covariance entries on the diagonal and on the edges of the current graph."""

    def __init__(self, diag, edges=None):
        self.diag = [float(x) for x in diag]
        self.edge = dict(edges or {})

    def copy(self):
        return IncompleteCov(list(self.diag), dict(self.edge))

    def block_ok(self, u, v):
        a, c, b = self.diag[u], self.diag[v], self.edge[(min(u, v), max(u, v))]
        return a > 0 and c > 0 and a * c - b * b > 0

    @classmethod
    def initial(cls, g: LabeledGraph, stats: SuffStats, shrink: float = 0.99):
        """Sample variances on the diagonal (1 when there is no data); sample
        covariances on edges, clipped so each 2x2 block stays positive definite."""
        p = g.p
        if stats.n > 0:
            diag = [stats.u[v, v] / stats.n for v in range(p)]
            diag = [d if d > 0 else 1.0 for d in diag]
        else:
            diag = [1.0] * p
        edges = {}
        for u, v in g.edges:
            c = stats.u[u, v] / stats.n if stats.n > 0 else 0.0
            lim = shrink * math.sqrt(diag[u] * diag[v])
            edges[(u, v)] = max(-lim, min(lim, c))
        return cls(diag, edges)


class LocalDensity:
    """log h(Sigma_A) = log IW(Sigma_A; delta, D_A) + log N(x_A; Sigma_A) for |A| = 1, 2."""

    def __init__(self, model: Model):
        hiw = model.hiw
        self.delta = hiw.params.delta
        self.d = hiw.params.d
        self.u = hiw.stats.u
        self.n = hiw.stats.n
        p = model.p
        self.k1 = [log_k((v,), self.delta, self.d) for v in range(p)]
        self._k2 = {}

    def k2(self, u, v):
        key = (u, v)
        val = self._k2.get(key)
        if val is None:
            val = log_k(key, self.delta, self.d)
            self._k2[key] = val
        return val

    def node(self, v, s):
        if s <= 0:
            return -math.inf
        n = self.n
        a = self.delta / 2.0 + 1.0
        return (
            self.k1[v]
            - a * math.log(s)
            - 0.5 * (self.d[v, v] + self.u[v, v]) / s
            - 0.5 * n * LOG_2PI
            - 0.5 * n * math.log(s)
        )

    def edge(self, u, v, su, sv, suv):
        if u > v:
            u, v, su, sv = v, u, sv, su
        det = su * sv - suv * suv
        if su <= 0 or sv <= 0 or det <= 0:
            return -math.inf
        n = self.n
        m11 = self.d[u, u] + self.u[u, u]
        m22 = self.d[v, v] + self.u[v, v]
        m12 = self.d[u, v] + self.u[u, v]
        tr = (m11 * sv - 2.0 * m12 * suv + m22 * su) / det
        logdet = math.log(det)
        return self.k2(u, v) - (self.delta + 4.0) / 2.0 * logdet - 0.5 * tr - n * LOG_2PI - 0.5 * n * logdet


def log_target(g: LabeledGraph, cov: IncompleteCov, model: Model, dens: LocalDensity = None) -> float:
    """log p(G) + sum over edges of log h - sum over nodes of (deg - 1) log h."""
    dens = dens or LocalDensity(model)
    total = model.prior.log_unnorm(g)
    deg = g.degrees()
    for u, v in sorted(g.edges):
        total += dens.edge(u, v, cov.diag[u], cov.diag[v], cov.edge[(u, v)])
    for v in range(g.p):
        total -= (deg[v] - 1) * dens.node(v, cov.diag[v])
    return total


def _log_q(x, sigma):
    return -0.5 * (x / sigma) ** 2 - math.log(sigma) - 0.5 * LOG_2PI


def _edge_gain(dens, cov, u, v, suv):
    """log h(Sigma_uv) - log h(Sigma_u) - log h(Sigma_v)."""
    su, sv = cov.diag[u], cov.diag[v]
    return dens.edge(u, v, su, sv, suv) - dens.node(u, su) - dens.node(v, sv)


class McmcState:
    def __init__(self, graph_class, start: LabeledGraph, model: Model, cov: IncompleteCov = None):
        self.graph_class = graph_class
        self.store = _make_store(graph_class, start)
        self.graph = start
        self.cov = cov if cov is not None else IncompleteCov.initial(start, model.stats)
        self.model = model
        self.dens = LocalDensity(model)
        self.stats = {"graph_proposed": 0, "graph_accepted": 0, "cov_proposed": 0, "cov_accepted": 0}


def forest_move_log_ratio(state: McmcState, move: ForestMove, u_val: float, sigma_g: float) -> float:
    """log of (target ratio) x (proposal ratio) for adding or removing one edge."""
    store, cov, dens = state.store, state.cov, state.dens
    i, j = min(move.u, move.v), max(move.u, move.v)
    n_exist, n_add = store.n_existing(), store.n_addable()
    if move.kind == "add":
        size_i = len(store.component(i))
        size_j = len(store.component(j))
        new = state.graph.with_edge(i, j)
        log_t = _edge_gain(dens, cov, i, j, u_val)
        log_fwd = -math.log(n_exist + n_add) + _log_q(u_val, sigma_g)
        log_rev = -math.log(n_exist + 1 + n_add - size_i * size_j)
    else:
        child = i if store.parent[i] == j else j
        size_c = len(_subtree(store.children, child))
        size_o = len(store.component(child)) - size_c
        new = state.graph.without_edge(i, j)
        log_t = -_edge_gain(dens, cov, i, j, cov.edge[(i, j)])
        log_fwd = -math.log(n_exist + n_add)
        log_rev = -math.log(n_exist - 1 + n_add + size_c * size_o) + _log_q(cov.edge[(i, j)], sigma_g)
    if log_t == -math.inf or log_t != log_t:
        return -math.inf
    return log_t + log_rev - log_fwd + state.model.prior.log_ratio(new, state.graph)


def _subtree(children, v):
    out = []
    stack = [v]
    while stack:
        a = stack.pop()
        out.append(a)
        stack.extend(children[a])
    return out


def mcmc_forest_step(state: McmcState, cfg: McmcConfig, rng: random.Random) -> bool:
    """One add/remove proposal; returns whether it was accepted."""
    store = state.store
    if store.n_addable() + store.n_existing() == 0:
        return False
    move = store.uniform_move(rng)
    u_val = rng.gauss(0.0, cfg.sigma_g) if move.kind == "add" else None
    log_a = forest_move_log_ratio(state, move, u_val, cfg.sigma_g)
    state.stats["graph_proposed"] += 1
    if not _accept(rng, log_a):
        return False
    i, j = min(move.u, move.v), max(move.u, move.v)
    store.apply(move)
    if move.kind == "add":
        state.cov.edge[(i, j)] = u_val
        state.graph = state.graph.with_edge(i, j)
    else:
        del state.cov.edge[(i, j)]
        state.graph = state.graph.without_edge(i, j)
    state.stats["graph_accepted"] += 1
    return True


def _accept(rng, log_a):
    if log_a >= 0:
        return True
    if log_a == -math.inf or log_a != log_a:
        return False
    return rng.random() < math.exp(log_a)


def _tree_proposal(store: TreeStore, system: str, rng):
    if system.upper() == "A":
        return store.uniform_move(rng)
    # edge chosen uniformly, then a uniform reinsertion place
    return store._reinsert(rng.randrange(1, store.p), rng)


def tree_move_log_ratio(state: McmcState, move: TreeMove, new_val: float, sigma_g: float, system: str = "A") -> float:
    """log acceptance ratio (before the min with 1) for an edge-move.

    With System A the proposal probability of a move is 1/m(G), m counting
    all non-identity moves, so the ratio carries m(G)/m(G').  With a uniform
    edge choice the move probabilities cancel.  The store is left unchanged.
    """
    store, cov, dens = state.store, state.cov, state.dens
    i, j = move.removed
    k, l = move.added
    old_val = cov.edge[(i, j)]
    log_t = _edge_gain(dens, cov, k, l, new_val) - _edge_gain(dens, cov, i, j, old_val)
    if log_t != log_t or log_t == -math.inf:
        return -math.inf
    log_p = _log_q(old_val, sigma_g) - _log_q(new_val, sigma_g)
    if system.upper() == "A":
        m_old = store.count_moves()
        store.apply(move)
        m_new = store.count_moves()
        store.apply(store.inverse(move))
        log_p += math.log(m_old) - math.log(m_new)
    new_edges = set(state.graph.edges)
    new_edges.discard((i, j))
    new_edges.add((k, l))
    new = LabeledGraph(store.p, new_edges)
    return log_t + log_p + state.model.prior.log_ratio(new, state.graph)


def mcmc_tree_step(state: McmcState, cfg: McmcConfig, rng: random.Random) -> bool:
    store = state.store
    if store.p < 3:
        return False
    move = _tree_proposal(store, cfg.system, rng)
    new_val = rng.gauss(0.0, cfg.sigma_g)
    log_a = tree_move_log_ratio(state, move, new_val, cfg.sigma_g, cfg.system)
    state.stats["graph_proposed"] += 1
    if not _accept(rng, log_a):
        return False
    store.apply(move)
    del state.cov.edge[move.removed]
    state.cov.edge[move.added] = new_val
    new_edges = set(state.graph.edges)
    new_edges.discard(move.removed)
    new_edges.add(move.added)
    state.graph = LabeledGraph(store.p, new_edges)
    state.stats["graph_accepted"] += 1
    return True


def mcmc_cov_step(state: McmcState, cfg: McmcConfig, rng: random.Random, proposal: IncompleteCov = None) -> bool:
    """Perturb every stored covariance entry and accept or reject them together."""
    cov = state.cov
    if proposal is None:
        proposal = IncompleteCov(
            [x + rng.gauss(0.0, cfg.sigma_ij) for x in cov.diag],
            {e: x + rng.gauss(0.0, cfg.sigma_ij) for e, x in sorted(cov.edge.items())},
        )
    state.stats["cov_proposed"] += 1
    new = log_target(state.graph, proposal, state.model, state.dens)
    if new == -math.inf:
        return False
    old = log_target(state.graph, cov, state.model, state.dens)
    if not _accept(rng, new - old):
        return False
    state.cov = proposal
    state.stats["cov_accepted"] += 1
    return True


def mcmc_run(graph_class: str, start: LabeledGraph, cfg: McmcConfig, model: Model, cov: IncompleteCov = None) -> PosteriorRecord:
    """Alternate one graph move and one covariance move per iteration, counting visits."""
    rng = random.Random(cfg.seed)
    state = McmcState(graph_class, start, model, cov)
    graph_step = mcmc_tree_step if graph_class == "tree" else mcmc_forest_step
    counts = {}
    trace = []
    it = 0
    t0 = time.perf_counter()
    while not _budget_done(it, cfg, t0):
        it += 1
        graph_step(state, cfg, rng)
        mcmc_cov_step(state, cfg, rng)
        b = state.store.bits
        counts[b] = counts.get(b, 0) + 1
        trace.append(model.score(state.graph))
    rec = PosteriorRecord(model.p, graph_class, "count", counts, trace)
    st = state.stats
    rec.info = {
        "iterations": it,
        "seconds": time.perf_counter() - t0,
        "budget": "seconds" if cfg.seconds is not None else "iterations",
        "top": cfg.top,
        "graph_acceptance": st["graph_accepted"] / max(1, st["graph_proposed"]),
        "cov_acceptance": st["cov_accepted"] / max(1, st["cov_proposed"]),
    }
    rec.best = [(g, model.score(g)) for g, _ in rec.top_graphs(cfg.top)]
    rec.state = state
    return rec
