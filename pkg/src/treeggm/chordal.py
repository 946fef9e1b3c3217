"""Triangulation by elimination, recursive thinning to a minimal triangulation,
decomposability testing and clique/separator extraction.
"""

from dataclasses import dataclass, field
import itertools

from .graph import LabeledGraph


@dataclass(frozen=True)
class Triangulation:
    base: LabeledGraph
    fill: frozenset

    def __post_init__(self):
        fill = frozenset((min(u, v), max(u, v)) for u, v in self.fill)
        object.__setattr__(self, "fill", fill)
        if fill & self.base.edges:
            raise ValueError("fill edges overlap base edges")
        if not mcs_is_decomposable(self.graph()):
            raise ValueError("base plus fill is not chordal")

    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.base.p, self.base.edges | self.fill)


@dataclass
class CliqueSeparatorDecomposition:
    cliques: list
    separators: list = field(default_factory=list)


def eliminate(g: LabeledGraph, ordering) -> Triangulation:
    """Elimination game: remove nodes in order, joining the remaining neighbours of each."""
    ordering = [int(v) for v in ordering]
    if sorted(ordering) != list(range(g.p)):
        raise ValueError("ordering is not a permutation of 0..p-1")
    adj = [set(a) for a in g.adjacency]
    fill = set()
    for v in ordering:
        nbrs = sorted(adj[v])
        for a, b in itertools.combinations(nbrs, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                fill.add((a, b))
        for a in nbrs:
            adj[a].discard(v)
        adj[v] = set()
    return Triangulation(g, frozenset(fill))


def min_degree_ordering(g: LabeledGraph) -> list:
    """Greedy ordering: repeatedly eliminate the node of smallest current degree (lowest index on ties)."""
    adj = [set(a) for a in g.adjacency]
    remaining = set(range(g.p))
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (len(adj[x]), x))
        nbrs = list(adj[v])
        for a, b in itertools.combinations(nbrs, 2):
            adj[a].add(b)
            adj[b].add(a)
        for a in nbrs:
            adj[a].discard(v)
        remaining.discard(v)
        order.append(v)
    return order


def _removable(adj, x, y):
    """A fill edge (x, y) can go iff the common neighbours of x and y form a clique."""
    common = adj[x] & adj[y]
    for a in common:
        if not common <= adj[a] | {a}:
            return False
    return True


def _adjacency(t: Triangulation):
    adj = [set(a) for a in t.base.adjacency]
    for u, v in t.fill:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def recursive_thin_ii(t: Triangulation, trace=None) -> Triangulation:
    """Repeat full passes over the remaining fill edges until a pass removes nothing.

    If ``trace`` is a list, the edges removed on each pass are appended to it
    (the final, empty pass included).
    """
    adj = _adjacency(t)
    fill = sorted(t.fill)
    while True:
        removed = []
        for x, y in fill:
            if _removable(adj, x, y):
                adj[x].discard(y)
                adj[y].discard(x)
                removed.append((x, y))
        if trace is not None:
            trace.append(removed)
        if not removed:
            break
        gone = set(removed)
        fill = [e for e in fill if e not in gone]
    return Triangulation(t.base, frozenset(fill))


def recursive_thin_iii(t: Triangulation, trace=None) -> Triangulation:
    """Like recursive_thin_ii, but each later pass only re-checks fill edges
    touching an endpoint of an edge removed in the previous pass.

    ``trace`` receives one ``(checked, removed)`` pair per pass.
    """
    adj = _adjacency(t)
    fill = set(t.fill)
    candidates = sorted(fill)
    while True:
        touched = set()
        removed = []
        for x, y in candidates:
            if _removable(adj, x, y):
                adj[x].discard(y)
                adj[y].discard(x)
                fill.discard((x, y))
                touched.update((x, y))
                removed.append((x, y))
        if trace is not None:
            trace.append((list(candidates), removed))
        if not touched:
            break
        candidates = sorted(e for e in fill if e[0] in touched or e[1] in touched)
    return Triangulation(t.base, frozenset(fill))


def _mcs_order(adj, p):
    """Maximum cardinality search; returns nodes in visiting order."""
    weight = [0] * p
    numbered = [False] * p
    order = []
    for _ in range(p):
        best = -1
        bw = -1
        for v in range(p):
            if not numbered[v] and weight[v] > bw:
                best, bw = v, weight[v]
        numbered[best] = True
        order.append(best)
        for a in adj[best]:
            if not numbered[a]:
                weight[a] += 1
    return order


def _is_peo(adj, order):
    """Check that each node's earlier-visited neighbours form a clique."""
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [a for a in adj[v] if pos[a] < pos[v]]
        if len(earlier) < 2:
            continue
        last = max(earlier, key=pos.__getitem__)
        for a in earlier:
            if a != last and a not in adj[last]:
                return False
    return True


def mcs_is_decomposable(g: LabeledGraph) -> bool:
    adj = g.adjacency
    return _is_peo(adj, _mcs_order(adj, g.p))


def clique_separator_decomposition(g: LabeledGraph) -> CliqueSeparatorDecomposition:
    """Cliques in a perfect sequence and the separators between them.

    Each node joins the clique built from its earlier-visited neighbours
    when those neighbours are exactly the previous clique; otherwise it
    starts a new clique whose separator is that neighbour set (possibly
    empty, once per additional connected component).
    """
    adj = g.adjacency
    order = _mcs_order(adj, g.p)
    if not _is_peo(adj, order):
        raise ValueError("graph is not decomposable")
    pos = {v: i for i, v in enumerate(order)}
    cliques = []
    separators = []
    for v in order:
        earlier = frozenset(a for a in adj[v] if pos[a] < pos[v])
        if cliques and earlier == cliques[-1]:
            cliques[-1] = cliques[-1] | {v}
        else:
            if cliques:
                separators.append(earlier)
            cliques.append(earlier | {v})
    return CliqueSeparatorDecomposition(
        [frozenset(c) for c in cliques], [frozenset(s) for s in separators]
    )


def _decomposable_mask(adj, n):
    """MCS plus elimination check on adjacency bitmasks."""
    numbered = 0
    weight = [0] * n
    order = []
    for _ in range(n):
        best = -1
        bw = -1
        for v in range(n):
            if not (numbered >> v) & 1 and weight[v] > bw:
                best, bw = v, weight[v]
        earlier = adj[best] & numbered
        if earlier & (earlier - 1):
            # at least two earlier neighbours: they must all be adjacent to the latest one
            last = -1
            for u in reversed(order):
                if (earlier >> u) & 1:
                    last = u
                    break
            rest = earlier & ~(1 << last)
            if rest & ~adj[last]:
                return False
        numbered |= 1 << best
        order.append(best)
        m = adj[best] & ~numbered
        while m:
            low = m & -m
            weight[low.bit_length() - 1] += 1
            m ^= low
    return True


def count_decomposable(n: int) -> int:
    """Number of labeled decomposable graphs on n nodes, by exhaustive scan.

    Graphs are built one node at a time (node v together with its edges to
    nodes below v).  Induced subgraphs of decomposable graphs are
    decomposable, so a prefix that fails the test cannot be completed and
    its extensions are skipped; every counted graph passes the MCS test.
    """
    if not 1 <= n <= 7:
        raise ValueError("count_decomposable supports 1 <= n <= 7")

    def rec(v, adj):
        if not _decomposable_mask(adj, v):
            return 0
        if v == n:
            return 1
        total = 0
        for mask in range(1 << v):
            new = list(adj)
            m = mask
            while m:
                low = m & -m
                new[low.bit_length() - 1] |= 1 << v
                m ^= low
            new.append(mask)
            total += rec(v + 1, new)
        return total

    return rec(1, [0])


def is_minimal(t: Triangulation) -> bool:
    """Every remaining fill edge is needed: dropping any one breaks chordality."""
    full = t.graph()
    for e in t.fill:
        if mcs_is_decomposable(full.without_edge(*e)):
            return False
    return True
