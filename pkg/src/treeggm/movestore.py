"""Rooted stores for forests and trees that support cheap uniform local moves.

A forest is kept as a set of rooted trees together with a partition of the
nodes into components and a three-way partition of all node pairs into
``existing`` edges, ``addable`` pairs (different components) and
``nonaddable`` pairs (same component, not an edge).  Adding or removing an
edge touches only the two components involved.

A spanning tree is kept rooted at node 0 with every other node carrying
its weight W(v), the size of the subtree below and including v.  Removing
the edge above v splits the tree into parts of size W(v) and p - W(v), so
there are W(v)(p - W(v)) - 1 ways to move that edge somewhere else.
"""

from collections import deque
from dataclasses import dataclass
import random

from .graph import LabeledGraph, pair_index


class IndexedSet:
    """Set with O(1) add, remove and uniform random choice."""

    __slots__ = ("items", "pos")

    def __init__(self, items=()):
        self.items = []
        self.pos = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def remove(self, x):
        i = self.pos.pop(x)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def __contains__(self, x):
        return x in self.pos

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def as_set(self):
        return set(self.items)


class Partition:
    """Two associative maps: object -> part label and part label -> objects.

    Labels are allocated from a counter and never reused.
    """

    def __init__(self):
        self.label_of = {}
        self.members = {}
        self._next = 0

    def new_part(self, objs=()):
        label = self._next
        self._next += 1
        self.members[label] = IndexedSet()
        for x in objs:
            self.put(x, label)
        return label

    def put(self, x, label):
        old = self.label_of.get(x)
        if old is not None:
            self.members[old].remove(x)
        self.label_of[x] = label
        self.members[label].add(x)

    def drop_if_empty(self, label):
        if label in self.members and not self.members[label]:
            del self.members[label]

    def groups(self):
        """Contents as a set of frozensets, independent of labels."""
        return {frozenset(m.items) for m in self.members.values() if len(m)}


EXISTING, ADDABLE, NONADDABLE = "existing", "addable", "nonaddable"


@dataclass(frozen=True)
class ForestMove:
    kind: str  # "add" or "remove"
    u: int
    v: int


class ForestStore:
    """Forest on nodes 0..p-1 stored as rooted trees with node and edge partitions."""

    def __init__(self, g: LabeledGraph):
        p = g.p
        self.p = p
        self.parent = [None] * p
        self.children = [set() for _ in range(p)]
        self.nodes = Partition()
        self.pairs = {EXISTING: IndexedSet(), ADDABLE: IndexedSet(), NONADDABLE: IndexedSet()}
        self.bits = 0
        adj = g.adjacency
        seen = [False] * p
        for root in range(p):
            if seen[root]:
                continue
            label = self.nodes.new_part()
            seen[root] = True
            self.nodes.put(root, label)
            queue = deque([root])
            while queue:
                a = queue.popleft()
                for b in sorted(adj[a]):
                    if b == self.parent[a]:
                        continue
                    if seen[b]:
                        raise ValueError("graph is not a forest")
                    seen[b] = True
                    self.parent[b] = a
                    self.children[a].add(b)
                    self.nodes.put(b, label)
                    queue.append(b)
        for u, v in g.edges:
            self.bits |= 1 << pair_index(u, v)
        lab = self.nodes.label_of
        for v in range(p):
            for u in range(v):
                if (u, v) in g.edges:
                    self.pairs[EXISTING].add((u, v))
                elif lab[u] != lab[v]:
                    self.pairs[ADDABLE].add((u, v))
                else:
                    self.pairs[NONADDABLE].add((u, v))

    # -- queries -------------------------------------------------------
    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.p, self.pairs[EXISTING].items)

    def component(self, v):
        return self.nodes.members[self.nodes.label_of[v]]

    def n_existing(self):
        return len(self.pairs[EXISTING])

    def n_addable(self):
        return len(self.pairs[ADDABLE])

    def _move_pair(self, pair, src, dst):
        self.pairs[src].remove(pair)
        self.pairs[dst].add(pair)

    # -- updates -------------------------------------------------------
    def add_edge(self, u, v):
        """Join the components of u and v; v becomes u's parent."""
        pair = (min(u, v), max(u, v))
        if pair not in self.pairs[ADDABLE]:
            raise ValueError("pair %r is not addable" % (pair,))
        # Make u the root of its tree by reversing the path from u to its root.
        prev = None
        cur = u
        while cur is not None:
            nxt = self.parent[cur]
            if nxt is not None:
                self.children[cur].add(nxt)
                self.children[nxt].discard(cur)
            self.parent[cur] = prev
            prev, cur = cur, nxt
        # After the loop the old path points down towards u; attach u under v.
        self.parent[u] = v
        self.children[v].add(u)
        lu, lv = self.nodes.label_of[u], self.nodes.label_of[v]
        part_u = list(self.nodes.members[lu])
        part_v = list(self.nodes.members[lv])
        for a in part_u:
            for b in part_v:
                self._move_pair((min(a, b), max(a, b)), ADDABLE, NONADDABLE)
        self._move_pair(pair, NONADDABLE, EXISTING)
        for a in part_u:
            self.nodes.put(a, lv)
        self.nodes.drop_if_empty(lu)
        self.bits |= 1 << pair_index(*pair)

    def remove_edge(self, u, v):
        """Delete edge (u, v); the child's subtree becomes a new component."""
        pair = (min(u, v), max(u, v))
        if pair not in self.pairs[EXISTING]:
            raise ValueError("pair %r is not an edge" % (pair,))
        if self.parent[u] == v:
            child, par = u, v
        else:
            child, par = v, u
        self.parent[child] = None
        self.children[par].discard(child)
        young = []
        stack = [child]
        while stack:
            a = stack.pop()
            young.append(a)
            stack.extend(self.children[a])
        old_label = self.nodes.label_of[child]
        new_label = self.nodes.new_part()
        for a in young:
            self.nodes.put(a, new_label)
        rest = list(self.nodes.members[old_label])
        for a in young:
            for b in rest:
                q = (min(a, b), max(a, b))
                if q != pair:
                    self._move_pair(q, NONADDABLE, ADDABLE)
        self._move_pair(pair, EXISTING, ADDABLE)
        self.bits &= ~(1 << pair_index(*pair))

    def apply(self, move: ForestMove):
        if move.kind == "add":
            self.add_edge(move.u, move.v)
        elif move.kind == "remove":
            self.remove_edge(move.u, move.v)
        else:
            raise ValueError("unknown move kind %r" % move.kind)

    def uniform_move(self, rng) -> ForestMove:
        """Pick a pair uniformly from addable + existing; add or remove it accordingly."""
        na = len(self.pairs[ADDABLE])
        ne = len(self.pairs[EXISTING])
        if na + ne == 0:
            raise ValueError("no legal move")
        i = rng.randrange(na + ne)
        if i < na:
            return ForestMove("add", *self.pairs[ADDABLE].items[i])
        return ForestMove("remove", *self.pairs[EXISTING].items[i - na])

    def all_moves(self):
        moves = [ForestMove("add", *e) for e in self.pairs[ADDABLE]]
        moves += [ForestMove("remove", *e) for e in self.pairs[EXISTING]]
        return moves

    def neighbour_bits(self, move: ForestMove) -> int:
        return self.bits ^ (1 << pair_index(move.u, move.v))

    def snapshot(self):
        """Label-free view of the partitions, for comparison with a rebuild."""
        return (
            self.nodes.groups(),
            self.pairs[EXISTING].as_set(),
            self.pairs[ADDABLE].as_set(),
            self.pairs[NONADDABLE].as_set(),
            self.bits,
        )

    def check(self):
        """Validate the rooted structure against the stored partitions."""
        for v in range(self.p):
            par = self.parent[v]
            if par is not None:
                assert v in self.children[par]
                assert (min(v, par), max(v, par)) in self.pairs[EXISTING]
                assert self.nodes.label_of[v] == self.nodes.label_of[par]
            for c in self.children[v]:
                assert self.parent[c] == v
        assert sum(1 for v in range(self.p) if self.parent[v] is not None) == self.n_existing()
        assert self.snapshot() == ForestStore(self.graph()).snapshot()


@dataclass(frozen=True)
class TreeMove:
    old_child: int
    old_parent: int
    new_child: int
    new_parent: int

    @property
    def removed(self):
        return (min(self.old_child, self.old_parent), max(self.old_child, self.old_parent))

    @property
    def added(self):
        return (min(self.new_child, self.new_parent), max(self.new_child, self.new_parent))


class TreeStore:
    """Spanning tree rooted at node 0 with subtree weights W(v)."""

    def __init__(self, g: LabeledGraph):
        p = g.p
        self.p = p
        self.parent = [None] * p
        self.children = [set() for _ in range(p)]
        self.weight = [0] * p
        adj = g.adjacency
        seen = [False] * p
        seen[0] = True
        order = [0]
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for b in sorted(adj[a]):
                if b == self.parent[a]:
                    continue
                if seen[b]:
                    raise ValueError("graph has a cycle")
                seen[b] = True
                self.parent[b] = a
                self.children[a].add(b)
                order.append(b)
                queue.append(b)
        if len(order) != p:
            raise ValueError("graph is not connected, so it is not a tree")
        for v in reversed(order):
            self.weight[v] = 1 + sum(self.weight[c] for c in self.children[v])
        self.bits = 0
        for u, v in g.edges:
            self.bits |= 1 << pair_index(u, v)

    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.p, [(v, self.parent[v]) for v in range(1, self.p)])

    def edges(self):
        return [(min(v, self.parent[v]), max(v, self.parent[v])) for v in range(1, self.p)]

    def count_moves(self) -> int:
        """Number of edge-moves, the identity move excluded."""
        p = self.p
        return sum(w * (p - w) - 1 for w in self.weight[1:])

    def count_moves_with_identity(self) -> int:
        p = self.p
        return sum(w * (p - w) for w in self.weight[1:])

    def subtree(self, v):
        out = []
        stack = [v]
        children = self.children
        while stack:
            a = stack.pop()
            out.append(a)
            stack.extend(children[a])
        return out

    def is_below(self, v, anc):
        """True if anc lies on the path from v up to the root (v itself included)."""
        parent = self.parent
        while v is not None:
            if v == anc:
                return True
            v = parent[v]
        return False

    def pick_edge_child(self, rng):
        """Node v chosen with probability proportional to W(v)(p - W(v)) - 1."""
        p = self.p
        weight = self.weight
        total = 0
        for v in range(1, p):
            w = weight[v]
            total += w * (p - w) - 1
        r = rng.random() * total
        acc = 0
        for v in range(1, p):
            w = weight[v]
            acc += w * (p - w) - 1
            if r < acc:
                return v
        return p - 1

    def _reinsert(self, old_child, rng, young=None):
        """Uniform reinsertion place for the edge above old_child, identity excluded."""
        old_parent = self.parent[old_child]
        if young is None:
            young = self.subtree(old_child)
        young_set = set(young)
        old = [v for v in range(self.p) if v not in young_set]
        nyoung, nold = len(young), len(old)
        total = nyoung * nold - 1
        if total <= 0:
            raise ValueError("edge has no alternative placement")
        k = rng.randrange(total)
        # index of the identity pair in the young x old grid, which is skipped
        skip = young.index(old_child) * nold + old.index(old_parent)
        if k >= skip:
            k += 1
        return TreeMove(old_child, old_parent, young[k // nold], old[k % nold])

    def uniform_move(self, rng) -> TreeMove:
        """Draw uniformly from all edge-moves other than the identity."""
        if self.p < 3:
            raise ValueError("no non-trivial edge-move exists for p < 3")
        return self._reinsert(self.pick_edge_child(rng), rng)

    def all_moves(self):
        moves = []
        for v in range(1, self.p):
            young = self.subtree(v)
            ys = set(young)
            par = self.parent[v]
            for a in sorted(young):
                for b in range(self.p):
                    if b not in ys and not (a == v and b == par):
                        moves.append(TreeMove(v, par, a, b))
        return moves

    def neighbour_bits(self, m: TreeMove) -> int:
        return self.bits ^ (1 << pair_index(*m.removed)) ^ (1 << pair_index(*m.added))

    def is_legal(self, m: TreeMove) -> bool:
        if not (0 < m.old_child < self.p) or self.parent[m.old_child] != m.old_parent:
            return False
        if (m.new_child, m.new_parent) == (m.old_child, m.old_parent):
            return False
        return self.is_below(m.new_child, m.old_child) and not self.is_below(m.new_parent, m.old_child)

    def apply(self, m: TreeMove):
        """Perform an edge-move, updating orientation and weights along the affected paths."""
        if not self.is_legal(m):
            raise ValueError("illegal move %r" % (m,))
        parent, children, weight = self.parent, self.children, self.weight
        young_size = weight[m.old_child]
        old_parent = m.old_parent
        children[old_parent].discard(m.old_child)
        parent[m.old_child] = None
        # Re-root the young component at new_child: walk up to old_child,
        # reversing arrows; each node's new weight is |young| minus the old
        # weight of the node it previously hung under on this path.
        prev = None
        prev_old_weight = 0
        cur = m.new_child
        while cur is not None:
            up = parent[cur]
            w_cur = weight[cur]
            weight[cur] = young_size - prev_old_weight
            if up is not None:
                children[up].discard(cur)
                children[cur].add(up)
            parent[cur] = prev
            prev, prev_old_weight = cur, w_cur
            cur = up
        parent[m.new_child] = m.new_parent
        children[m.new_parent].add(m.new_child)
        # Nodes on the old_parent -> root path.
        on_old_path = set()
        a = old_parent
        while a is not None:
            on_old_path.add(a)
            a = parent[a]
        # Ancestors of new_parent below the common ancestor gain the young component.
        a = m.new_parent
        while a not in on_old_path:
            weight[a] += young_size
            a = parent[a]
        common = a
        # Ancestors of old_parent below the common ancestor lose it.
        a = old_parent
        while a != common:
            weight[a] -= young_size
            a = parent[a]
        self.bits ^= (1 << pair_index(*m.removed)) ^ (1 << pair_index(*m.added))

    def inverse(self, m: TreeMove) -> TreeMove:
        """The move that undoes m once m has been applied."""
        if self.parent[m.new_child] == m.new_parent:
            return TreeMove(m.new_child, m.new_parent, m.old_child, m.old_parent)
        raise ValueError("move has not been applied")

    def snapshot(self):
        return (tuple(self.parent), tuple(frozenset(c) for c in self.children), tuple(self.weight), self.bits)

    def check(self):
        for v in range(1, self.p):
            assert self.weight[v] == 1 + sum(self.weight[c] for c in self.children[v])
            assert v in self.children[self.parent[v]]
        assert sum(self.weight[c] for c in self.children[0]) == self.p - 1
        assert self.snapshot() == TreeStore(self.graph()).snapshot()


# -- proposal systems ----------------------------------------------------

SYSTEMS = ("A", "B", "C", "D")


def _as_rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def propose_moves(store, system: str, omega, seed):
    """``omega`` distinct moves from a TreeStore (any system) or a ForestStore.

    For trees:
      A  each move uniform over all moves (distinct draws).
      B, C  an edge list with p - 2 copies of each edge is sampled without
            replacement; each edge drawn m times gets m distinct reinsertion
            places, uniform over its alternatives.  B and C differ only in
            whether the store keeps weights, so they propose identically.
      D  repeatedly pick an edge and a reinsertion place uniformly, rejecting
         duplicates.
    For forests every system draws a uniform subset of addable + existing.
    ``omega=None`` returns every move.
    """
    rng = _as_rng(seed)
    system = system.upper()
    if system not in SYSTEMS:
        raise ValueError("unknown system %r" % system)
    if isinstance(store, ForestStore):
        moves = store.all_moves()
        if omega is None:
            return moves
        if omega > len(moves):
            raise ValueError("omega exceeds the number of available moves")
        return rng.sample(moves, omega)
    total = store.count_moves()
    if omega is None:
        return store.all_moves()
    if omega < 1 or omega > total:
        raise ValueError("omega must lie in [1, %d]" % total)
    p = store.p
    if system == "A":
        if 2 * omega > total:
            return rng.sample(store.all_moves(), omega)
        chosen = {}
        while len(chosen) < omega:
            m = store.uniform_move(rng)
            chosen.setdefault(m, None)
        return list(chosen)
    if system in ("B", "C"):
        if omega > (p - 1) * (p - 2):
            raise ValueError("systems B and C need omega <= (p-1)(p-2)")
        pool = [v for v in range(1, p) for _ in range(p - 2)]
        counts = {}
        for v in rng.sample(pool, omega):
            counts[v] = counts.get(v, 0) + 1
        moves = []
        for v in sorted(counts):
            m_e = counts[v]
            young = store.subtree(v)
            if m_e > len(young) * (p - len(young)) - 1:
                raise ValueError("edge drawn more often than it has reinsertion places")
            picked = set()
            while len(picked) < m_e:
                picked.add(store._reinsert(v, rng, young))
            moves.extend(sorted(picked, key=lambda x: (x.new_child, x.new_parent)))
        return moves
    chosen = {}
    while len(chosen) < omega:
        v = rng.randrange(1, p)
        chosen.setdefault(store._reinsert(v, rng), None)
    return list(chosen)
