"""Labeled undirected graphs on nodes 0..p-1 and exhaustive enumeration helpers."""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator

__all__ = [
    "LabeledGraph",
    "pair_index",
    "is_forest",
    "is_tree",
    "prufer_decode",
    "prufer_encode",
    "enumerate_trees",
    "enumerate_forests",
    "erdos_gallai_check",
    "read_graph",
    "write_graph",
    "parse_graph",
    "format_graph",
    "star",
    "chain",
    "complete",
]


def pair_index(u: int, v: int) -> int:
    """Position of the pair {u, v} in the lower triangle, row by row."""
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


class LabeledGraph:
    """Simple undirected graph with nodes 0..p-1.

    Edges are kept as a frozenset of (u, v) with u < v.  Instances are
    immutable; ``with_edge``/``without_edge`` return new graphs.
    """

    __slots__ = ("p", "edges", "_adj", "_bits")

    def __init__(self, p: int, edges: Iterable = ()):
        p = int(p)
        if p < 1:
            raise ValueError("p must be positive, got %d" % p)
        canon = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError("self-loop at node %d" % u)
            if not (0 <= u < p and 0 <= v < p):
                raise ValueError("edge (%d, %d) out of range for p=%d" % (u, v, p))
            if u > v:
                u, v = v, u
            canon.add((u, v))
        self.p = p
        self.edges = frozenset(canon)
        self._adj = None
        self._bits = None

    @classmethod
    def from_bits(cls, p: int, bits: int) -> "LabeledGraph":
        edges = []
        for v in range(1, p):
            base = v * (v - 1) // 2
            for u in range(v):
                if bits >> (base + u) & 1:
                    edges.append((u, v))
        return cls(p, edges)

    @property
    def bits(self) -> int:
        """Canonical fingerprint: bit ``pair_index(u, v)`` set for each edge."""
        if self._bits is None:
            b = 0
            for u, v in self.edges:
                b |= 1 << pair_index(u, v)
            self._bits = b
        return self._bits

    @property
    def adjacency(self) -> list:
        if self._adj is None:
            adj = [set() for _ in range(self.p)]
            for u, v in self.edges:
                adj[u].add(v)
                adj[v].add(u)
            self._adj = adj
        return self._adj

    def neighbors(self, v: int) -> set:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    def with_edge(self, u: int, v: int) -> "LabeledGraph":
        return LabeledGraph(self.p, self.edges | {(min(u, v), max(u, v))})

    def without_edge(self, u: int, v: int) -> "LabeledGraph":
        return LabeledGraph(self.p, self.edges - {(min(u, v), max(u, v))})

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def __len__(self):
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.p == other.p and self.edges == other.edges

    def __hash__(self):
        return hash((self.p, self.edges))

    def __repr__(self):
        return "LabeledGraph(p=%d, edges=%r)" % (self.p, self.sorted_edges())


def star(p: int, center: int = 0) -> LabeledGraph:
    return LabeledGraph(p, [(center, v) for v in range(p) if v != center])


def chain(p: int) -> LabeledGraph:
    return LabeledGraph(p, [(v, v + 1) for v in range(p - 1)])


def complete(p: int) -> LabeledGraph:
    return LabeledGraph(p, itertools.combinations(range(p), 2))


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def is_forest(g: LabeledGraph) -> bool:
    """True iff g has no cycle: an edge inside an existing component closes one."""
    parent = list(range(g.p))
    for u, v in g.edges:
        ru, rv = _find(parent, u), _find(parent, v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def is_tree(g: LabeledGraph) -> bool:
    return len(g.edges) == g.p - 1 and is_forest(g)


def prufer_decode(seq, p: int) -> LabeledGraph:
    """Tree on p nodes whose Prüfer sequence is ``seq``."""
    seq = [int(s) for s in seq]
    if p < 2:
        raise ValueError("Prüfer sequences need p >= 2")
    if len(seq) != p - 2:
        raise ValueError("sequence length %d != p - 2 = %d" % (len(seq), p - 2))
    for s in seq:
        if not 0 <= s < p:
            raise ValueError("label %d out of range for p=%d" % (s, p))
    remaining = [0] * p
    for s in seq:
        remaining[s] += 1
    edges = []
    for s in seq:
        leaf = next(v for v in range(p) if remaining[v] == 0)
        edges.append((leaf, s))
        remaining[leaf] = -1
        remaining[s] -= 1
    last = [v for v in range(p) if remaining[v] == 0]
    edges.append((last[0], last[1]))
    return LabeledGraph(p, edges)


def prufer_encode(t: LabeledGraph) -> list:
    """Prüfer sequence of tree t: repeatedly strip the smallest leaf, record its neighbour."""
    if t.p < 2:
        raise ValueError("Prüfer sequences need p >= 2")
    if not is_tree(t):
        raise ValueError("input is not a tree")
    adj = [set(a) for a in t.adjacency]
    seq = []
    for _ in range(t.p - 2):
        leaf = min(v for v in range(t.p) if len(adj[v]) == 1)
        (nb,) = adj[leaf]
        seq.append(nb)
        adj[nb].discard(leaf)
        adj[leaf].clear()
    return seq


def enumerate_trees(p: int) -> Iterator[LabeledGraph]:
    """All p**(p-2) labeled trees, in Prüfer-sequence order."""
    if not 2 <= p <= 8:
        raise ValueError("enumerate_trees supports 2 <= p <= 8, got %d" % p)
    for seq in itertools.product(range(p), repeat=p - 2):
        yield prufer_decode(seq, p)


def enumerate_forests(p: int) -> Iterator[LabeledGraph]:
    """All acyclic edge subsets of K_p, each exactly once.

    Depth-first over the pairs in lexicographic order; a branch is cut as
    soon as the chosen pair would join two nodes already connected.
    """
    if not 1 <= p <= 6:
        raise ValueError("enumerate_forests supports 1 <= p <= 6, got %d" % p)
    pairs = list(itertools.combinations(range(p), 2))

    def rec(i, comp, chosen):
        if i == len(pairs):
            yield LabeledGraph(p, chosen)
            return
        yield from rec(i + 1, comp, chosen)
        u, v = pairs[i]
        if comp[u] != comp[v]:
            old, new = comp[u], comp[v]
            merged = [new if c == old else c for c in comp]
            chosen.append((u, v))
            yield from rec(i + 1, merged, chosen)
            chosen.pop()

    yield from rec(0, list(range(p)), [])


def erdos_gallai_check(degrees) -> bool:
    """Whether a non-increasing degree sequence is graphical."""
    d = [int(x) for x in degrees]
    if any(x < 0 for x in d):
        raise ValueError("degrees must be non-negative")
    if any(d[i] < d[i + 1] for i in range(len(d) - 1)):
        raise ValueError("degrees must be sorted in non-increasing order")
    if sum(d) % 2:
        return False
    n = len(d)
    for k in range(1, n + 1):
        lhs = sum(d[:k])
        rhs = k * (k - 1) + sum(min(k, x) for x in d[k:])
        if lhs > rhs:
            return False
    return True


def format_graph(g: LabeledGraph) -> str:
    lines = ["p %d" % g.p]
    lines += ["%d %d" % e for e in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> LabeledGraph:
    p = None
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if p is None:
            if len(parts) != 2 or parts[0] != "p":
                raise ValueError("first line must be 'p <count>', got %r" % line)
            p = int(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError("edge line must be 'u v', got %r" % line)
        edges.append((int(parts[0]), int(parts[1])))
    if p is None:
        raise ValueError("missing 'p <count>' header")
    g = LabeledGraph(p, edges)
    if len(g.edges) != len(edges):
        raise ValueError("duplicate edge in graph file")
    return g


def read_graph(path) -> LabeledGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: LabeledGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
