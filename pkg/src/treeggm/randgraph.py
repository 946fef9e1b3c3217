"""Erdős–Rényi samplers, exact cycle counts, and Poisson limits for short cycles."""

from collections import deque
import itertools
import math

import numpy as np

from .graph import LabeledGraph, erdos_gallai_check

MAX_NODES = 40
MAX_CYCLE_DIM = 25


def sample_gnp(n: int, prob: float, seed) -> LabeledGraph:
    """Each of the C(n,2) pairs present independently with probability ``prob``."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= prob <= 1.0:
        raise ValueError("prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < prob
    return LabeledGraph(n, [e for e, k in zip(pairs, keep) if k])


def sample_gnm(n: int, m: int, seed) -> LabeledGraph:
    """A uniformly random graph with exactly m edges."""
    if n < 1:
        raise ValueError("n must be positive")
    pairs = list(itertools.combinations(range(n), 2))
    if not 0 <= m <= len(pairs):
        raise ValueError("m must lie in [0, C(n,2)]")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pairs), size=m, replace=False)
    return LabeledGraph(n, [pairs[i] for i in sorted(idx)])


def _components(g):
    comp = [-1] * g.p
    c = 0
    for s in range(g.p):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            a = stack.pop()
            for b in g.adjacency[a]:
                if comp[b] < 0:
                    comp[b] = c
                    stack.append(b)
        c += 1
    return comp, c


def cycle_space_dimension(g: LabeledGraph) -> int:
    return len(g.edges) - g.p + _components(g)[1]


def _fundamental_cycles(g, edge_ids):
    """Edge masks of the fundamental cycles of a BFS spanning forest."""
    p = g.p
    parent = [-1] * p
    depth = [0] * p
    seen = [False] * p
    tree = set()
    for s in range(p):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for b in sorted(g.adjacency[a]):
                if not seen[b]:
                    seen[b] = True
                    parent[b] = a
                    depth[b] = depth[a] + 1
                    tree.add((min(a, b), max(a, b)))
                    queue.append(b)
    basis = []
    for e in sorted(g.edges):
        if e in tree:
            continue
        a, b = e
        mask = 1 << edge_ids[e]
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            pa = parent[a]
            mask |= 1 << edge_ids[(min(a, pa), max(a, pa))]
            a = pa
        basis.append(mask)
    return basis


def _single_cycles(masks, edges, incident):
    """Boolean array: which 2-regular edge masks form exactly one cycle.

    Walks every candidate at once from an endpoint of its lowest edge and
    compares the length of the closed walk with the number of edges.
    """
    eu = np.array([u for u, _ in edges], dtype=np.int64)
    ev = np.array([v for _, v in edges], dtype=np.int64)
    inc = np.array(incident, dtype=np.uint64)
    size = np.bitwise_count(masks).astype(np.int64)
    first = masks & (~masks + np.uint64(1))
    idx = np.log2(first.astype(np.float64)).astype(np.int64)
    start = eu[idx]
    cur = ev[idx]
    prev = first
    steps = np.ones(masks.shape, dtype=np.int64)
    closed = cur == start
    for _ in range(int(size.max()) if size.size else 0):
        if closed.all():
            break
        avail = masks & inc[cur] & ~prev
        nxt_edge = avail & (~avail + np.uint64(1))
        open_ = ~closed
        j = np.log2(np.where(open_, nxt_edge, np.uint64(1)).astype(np.float64)).astype(np.int64)
        other = np.where(eu[j] == cur, ev[j], eu[j])
        cur = np.where(open_, other, cur)
        prev = np.where(open_, nxt_edge, prev)
        steps = steps + open_
        closed = closed | (cur == start)
    return steps == size


def enumerate_cycles(g: LabeledGraph) -> dict:
    """Count simple cycles by length.

    Every simple cycle is a sum (mod 2) of fundamental cycles, so all
    2**dim combinations are formed and those in which every node has degree
    0 or 2 and whose edges are connected are kept.
    """
    if g.p > MAX_NODES:
        raise ValueError("enumerate_cycles supports at most %d nodes" % MAX_NODES)
    dim = cycle_space_dimension(g)
    if dim > MAX_CYCLE_DIM:
        raise ValueError("cycle space dimension %d exceeds %d" % (dim, MAX_CYCLE_DIM))
    if dim == 0:
        return {}
    edges = sorted(g.edges)
    edge_ids = {e: i for i, e in enumerate(edges)}
    basis = _fundamental_cycles(g, edge_ids)
    combos = np.zeros(1, dtype=np.uint64)
    for b in basis:
        combos = np.concatenate([combos, combos ^ np.uint64(b)])
    combos = combos[1:]
    incident = [0] * g.p
    for i, (u, v) in enumerate(edges):
        incident[u] |= 1 << i
        incident[v] |= 1 << i
    ok = np.ones(combos.shape, dtype=bool)
    for v in range(g.p):
        if incident[v] == 0:
            continue
        d = np.bitwise_count(combos & np.uint64(incident[v]))
        ok &= (d == 0) | (d == 2)
    cand = combos[ok]
    if cand.size == 0:
        return {}
    cycles = cand[_single_cycles(cand, edges, incident)]
    lengths, freq = np.unique(np.bitwise_count(cycles), return_counts=True)
    return {int(a): int(b) for a, b in zip(lengths, freq)}


def girth(g: LabeledGraph):
    """Length of the shortest cycle by BFS from every node; None for forests."""
    best = None
    for s in range(g.p):
        dist = {s: 0}
        par = {s: -1}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for b in g.adjacency[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    par[b] = a
                    queue.append(b)
                elif par[a] != b:
                    length = dist[a] + dist[b] + 1
                    if best is None or length < best:
                        best = length
    return best


def poisson_params(model: str, param, lengths) -> dict:
    """Limiting Poisson means of the number of cycles of each length.

    model is one of
      ``gnp``     G(n, c/n):   lambda_i = c^i / 2i
      ``gnm``     G(n, cn):    lambda_i = (2c)^i / 2i
      ``regular`` d-regular:   lambda_i = (d - 1)^i / 2i
      ``degseq``  given degrees d_1..d_n:  lambda_i = L^i / 2i with
                  L = sum C(d_j, 2) / (sum d_j / 2)
    """
    if model == "gnp":
        base = float(param)
    elif model == "gnm":
        base = 2.0 * float(param)
    elif model == "regular":
        if param < 1:
            raise ValueError("degree must be positive")
        base = float(param) - 1.0
    elif model == "degseq":
        degs = sorted((int(x) for x in param), reverse=True)
        if not erdos_gallai_check(degs):
            raise ValueError("degree sequence is not graphical")
        m = sum(degs) / 2.0
        if m == 0:
            raise ValueError("degree sequence has no edges")
        base = sum(math.comb(d, 2) for d in degs) / m
    else:
        raise ValueError("unknown model %r" % model)
    if base <= 0:
        raise ValueError("parameters give zero expected cycle counts")
    return {i: base ** i / (2.0 * i) for i in lengths}


def girth_tail_probability(d: int, g: int) -> float:
    """Leading-order probability that a random d-regular graph has girth above g."""
    if d < 3:
        raise ValueError("d must be at least 3")
    return math.exp(-sum((d - 1) ** r / (2.0 * r) for r in range(3, g + 1)))


def monte_carlo_cycles(model: str, n: int, param, samples: int, seed, max_length=None):
    """Mean and variance of the cycle counts over random graphs.

    ``model`` is "gnp" (param = edge probability) or "gnm" (param = edge
    count).  Draw k uses seed + k.  Returns {length: (mean, variance)} for
    lengths 3..max_length (default n).
    """
    max_length = n if max_length is None else max_length
    lengths = range(3, max_length + 1)
    sums = {i: 0.0 for i in lengths}
    sq = {i: 0.0 for i in lengths}
    for k in range(samples):
        if model == "gnp":
            g = sample_gnp(n, param, seed + k)
        elif model == "gnm":
            g = sample_gnm(n, param, seed + k)
        else:
            raise ValueError("unknown model %r" % model)
        census = enumerate_cycles(g)
        for i in lengths:
            x = census.get(i, 0)
            sums[i] += x
            sq[i] += x * x
    out = {}
    for i in lengths:
        mean = sums[i] / samples
        out[i] = (mean, sq[i] / samples - mean * mean)
    return out
