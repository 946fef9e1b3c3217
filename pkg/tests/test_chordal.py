import itertools
import random

import pytest

from treeggm.chordal import (
    Triangulation,
    clique_separator_decomposition,
    count_decomposable,
    eliminate,
    is_minimal,
    mcs_is_decomposable,
    min_degree_ordering,
    recursive_thin_ii,
    recursive_thin_iii,
)
from treeggm.graph import LabeledGraph, chain, complete, enumerate_forests, enumerate_trees, star
from treeggm.randgraph import sample_gnp

CYCLE4 = LabeledGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
# Worked thinning example, 0-indexed: solid chain 4-0-3-2-1, fill produced by
# eliminating 3, 2, 0 in that order.
WORKED_BASE = LabeledGraph(5, [(0, 4), (0, 3), (2, 3), (1, 2)])
WORKED_ORDER = [3, 2, 0, 1, 4]
WORKED_FILL = {(0, 1), (0, 2), (1, 4)}


def has_chordless_cycle(g):
    """Oracle: look for an induced cycle of length >= 4 by brute force over node subsets."""
    for k in range(4, g.p + 1):
        for nodes in itertools.combinations(range(g.p), k):
            sub = [n for n in nodes]
            if any(len(g.adjacency[v] & set(sub)) != 2 for v in sub):
                continue
            # every node has exactly two neighbours inside: union of cycles; check connected
            seen = {sub[0]}
            stack = [sub[0]]
            while stack:
                a = stack.pop()
                for b in g.adjacency[a] & set(sub):
                    if b not in seen:
                        seen.add(b)
                        stack.append(b)
            if len(seen) == k:
                return True
    return False


def all_graphs(p):
    pairs = list(itertools.combinations(range(p), 2))
    for mask in range(1 << len(pairs)):
        yield LabeledGraph(p, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def test_eliminate_examples():
    assert eliminate(chain(5), range(5)).fill == frozenset()
    assert eliminate(CYCLE4, [0, 1, 2, 3]).fill == {(1, 3)}
    with pytest.raises(ValueError):
        eliminate(CYCLE4, [0, 1, 2])


def test_eliminate_wheel_hub_first():
    wheel = LabeledGraph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)])
    tri = eliminate(wheel, [4, 0, 1, 2, 3])
    assert tri.fill == {(0, 2), (1, 3)}
    for thin in (recursive_thin_ii, recursive_thin_iii):
        out = thin(tri)
        assert len(out.fill) == 1
        assert is_minimal(out)


def test_triangulation_validates():
    with pytest.raises(ValueError):
        Triangulation(CYCLE4, frozenset())
    with pytest.raises(ValueError):
        Triangulation(CYCLE4, frozenset({(0, 1), (0, 2)}))


def test_min_degree_ordering_examples():
    assert min_degree_ordering(star(4))[0] == 1
    assert min_degree_ordering(LabeledGraph(4)) == [0, 1, 2, 3]
    assert min_degree_ordering(complete(3)) == [0, 1, 2]


@pytest.mark.parametrize("thin", [recursive_thin_ii, recursive_thin_iii])
def test_thinning_empty_fill_unchanged(thin):
    tri = Triangulation(chain(4), frozenset())
    assert thin(tri).fill == frozenset()


@pytest.mark.parametrize("thin", [recursive_thin_ii, recursive_thin_iii])
def test_square_with_both_diagonals(thin):
    tri = Triangulation(CYCLE4, frozenset({(0, 2), (1, 3)}))
    out = thin(tri)
    assert len(out.fill) == 1 and out.fill <= {(0, 2), (1, 3)}
    assert mcs_is_decomposable(out.graph())


def test_worked_example_reconstruction_matches_elimination():
    assert eliminate(WORKED_BASE, WORKED_ORDER).fill == WORKED_FILL


def test_worked_example_algorithm_ii_runs():
    trace = []
    out = recursive_thin_ii(Triangulation(WORKED_BASE, frozenset(WORKED_FILL)), trace)
    assert out.fill == frozenset()
    assert trace == [[(1, 4)], [(0, 1), (0, 2)], []]


def test_worked_example_algorithm_iii_runs():
    trace = []
    out = recursive_thin_iii(Triangulation(WORKED_BASE, frozenset(WORKED_FILL)), trace)
    assert out.fill == frozenset()
    checked = [c for c, _ in trace]
    removed = [r for _, r in trace]
    assert removed == [[(1, 4)], [(0, 1)], [(0, 2)], []]
    # the second run does not look at (0, 2) even though it becomes removable there
    assert checked[1] == [(0, 1)]
    assert checked[3] == []


def test_mcs_examples():
    assert not mcs_is_decomposable(CYCLE4)
    assert mcs_is_decomposable(CYCLE4.with_edge(0, 2))
    for p in range(2, 8):
        for t in enumerate_trees(p):
            assert mcs_is_decomposable(t)


def test_mcs_matches_chordless_cycle_oracle():
    for p in range(1, 7):
        for g in all_graphs(p):
            assert mcs_is_decomposable(g) == (not has_chordless_cycle(g))


def test_decomposition_tree():
    t = LabeledGraph(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    dec = clique_separator_decomposition(t)
    assert sorted(map(sorted, dec.cliques)) == sorted(map(list, t.edges))
    seps = sorted(sorted(s) for s in dec.separators)
    assert seps == [[1], [1], [3]]


def test_decomposition_forest_has_empty_separators():
    f = LabeledGraph(5, [(0, 1), (2, 3)])
    dec = clique_separator_decomposition(f)
    assert dec.separators.count(frozenset()) == 2
    assert sum(map(len, dec.cliques)) - sum(map(len, dec.separators)) == 5


def test_decomposition_k3_and_errors():
    dec = clique_separator_decomposition(complete(3))
    assert dec.cliques == [frozenset({0, 1, 2})] and dec.separators == []
    with pytest.raises(ValueError):
        clique_separator_decomposition(CYCLE4)


def test_decomposition_identity_on_all_small_chordal_graphs():
    for p in range(1, 6):
        for g in all_graphs(p):
            if not mcs_is_decomposable(g):
                continue
            dec = clique_separator_decomposition(g)
            assert sum(map(len, dec.cliques)) - sum(map(len, dec.separators)) == p
            covered = set()
            for c in dec.cliques:
                for a, b in itertools.combinations(sorted(c), 2):
                    assert g.has_edge(a, b)
                    covered.add((a, b))
            assert covered == set(g.edges)
            for s in dec.separators:
                for a, b in itertools.combinations(sorted(s), 2):
                    assert g.has_edge(a, b)
            for i in range(1, len(dec.cliques)):
                union = frozenset().union(*dec.cliques[:i])
                assert dec.cliques[i] & union == dec.separators[i - 1]
                assert any(dec.separators[i - 1] <= c for c in dec.cliques[:i])


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 8), (4, 61), (5, 822)])
def test_count_decomposable_small(n, count):
    assert count_decomposable(n) == count


def test_count_decomposable_matches_plain_scan():
    for n in range(1, 6):
        assert count_decomposable(n) == sum(mcs_is_decomposable(g) for g in all_graphs(n))


def test_count_guard():
    with pytest.raises(ValueError):
        count_decomposable(8)


def test_thinning_random_minimal_and_equal_size():
    rng = random.Random(7)
    for k in range(60):
        g = sample_gnp(12, rng.uniform(0.15, 0.4), 1000 + k)
        order = list(range(12)) if k % 2 else min_degree_ordering(g)
        tri = eliminate(g, order)
        a, b = recursive_thin_ii(tri), recursive_thin_iii(tri)
        assert a.fill <= tri.fill and b.fill <= tri.fill
        assert is_minimal(a) and is_minimal(b)
