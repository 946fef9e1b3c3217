import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from treeggm.graph import (
    LabeledGraph,
    chain,
    enumerate_forests,
    enumerate_trees,
    erdos_gallai_check,
    format_graph,
    is_forest,
    is_tree,
    pair_index,
    parse_graph,
    prufer_decode,
    prufer_encode,
    star,
)
from treeggm.randgraph import enumerate_cycles


def all_subsets(p):
    pairs = list(itertools.combinations(range(p), 2))
    for mask in range(1 << len(pairs)):
        yield LabeledGraph(p, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def has_cycle_dfs(g):
    """Independent acyclicity oracle: DFS looking for a back edge."""
    seen = [False] * g.p
    for s in range(g.p):
        if seen[s]:
            continue
        stack = [(s, -1)]
        while stack:
            v, parent = stack.pop()
            if seen[v]:
                return True
            seen[v] = True
            for w in g.adjacency[v]:
                if w != parent:
                    stack.append((w, v))
    return False


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        LabeledGraph(3, [(0, 0)])
    with pytest.raises(ValueError):
        LabeledGraph(3, [(0, 3)])
    assert LabeledGraph(3, [(2, 0)]).edges == {(0, 2)}


def test_bits_round_trip():
    g = LabeledGraph(5, [(0, 4), (1, 2), (3, 4)])
    assert LabeledGraph.from_bits(5, g.bits) == g
    assert pair_index(0, 1) == 0 and pair_index(0, 2) == 1 and pair_index(1, 2) == 2


@pytest.mark.parametrize(
    "p,edges,expected",
    [(3, [(0, 1), (1, 2)], True), (3, [(0, 1), (1, 2), (0, 2)], False), (4, [], True)],
)
def test_is_forest_examples(p, edges, expected):
    assert is_forest(LabeledGraph(p, edges)) is expected


@pytest.mark.parametrize(
    "p,edges,expected",
    [(4, [(0, 1), (0, 2), (0, 3)], True), (4, [(0, 1), (2, 3)], False), (1, [], True)],
)
def test_is_tree_examples(p, edges, expected):
    assert is_tree(LabeledGraph(p, edges)) is expected


def test_is_forest_matches_dfs_oracle():
    for p in range(1, 6):
        for g in all_subsets(p):
            assert is_forest(g) == (not has_cycle_dfs(g))
            if is_tree(g):
                assert is_forest(g)
            if is_forest(g) and len(g.edges) == g.p - 1:
                assert is_tree(g)


def test_prufer_examples():
    assert prufer_decode([0], 3) == LabeledGraph(3, [(0, 1), (0, 2)])
    assert prufer_decode([], 2) == LabeledGraph(2, [(0, 1)])
    assert prufer_encode(LabeledGraph(3, [(0, 1), (0, 2)])) == [0]
    assert prufer_encode(star(5)) == [0, 0, 0]
    assert prufer_encode(chain(4)) == [1, 2]


def test_prufer_errors():
    with pytest.raises(ValueError):
        prufer_decode([0, 1], 3)
    with pytest.raises(ValueError):
        prufer_decode([5], 3)
    with pytest.raises(ValueError):
        prufer_encode(LabeledGraph(3, [(0, 1)]))


def test_prufer_decode_p5_all_distinct():
    trees = {prufer_decode(s, 5) for s in itertools.product(range(5), repeat=3)}
    assert len(trees) == 125
    assert all(is_tree(t) for t in trees)


def test_prufer_round_trip_all_trees():
    for p in range(2, 8):
        for t in enumerate_trees(p):
            assert prufer_decode(prufer_encode(t), p) == t


@pytest.mark.parametrize("p,count", [(2, 1), (3, 3), (4, 16), (5, 125), (6, 1296), (7, 16807)])
def test_enumerate_trees_cayley(p, count):
    trees = list(enumerate_trees(p))
    assert len(trees) == count == p ** (p - 2)
    assert len(set(trees)) == count
    assert all(is_tree(t) for t in trees)


def test_enumerate_guards():
    with pytest.raises(ValueError):
        list(enumerate_trees(9))
    with pytest.raises(ValueError):
        list(enumerate_forests(7))


@pytest.mark.parametrize("p,count", [(1, 1), (2, 2), (3, 7), (4, 38)])
def test_enumerate_forests_counts(p, count):
    forests = list(enumerate_forests(p))
    assert len(forests) == count
    assert len(set(forests)) == count


def test_enumerate_forests_matches_subset_filter():
    for p in range(1, 6):
        oracle = {g for g in all_subsets(p) if not has_cycle_dfs(g)}
        assert set(enumerate_forests(p)) == oracle


def test_erdos_gallai_examples():
    assert erdos_gallai_check([2, 2, 0]) is False
    assert erdos_gallai_check([1, 1]) is True
    assert erdos_gallai_check([3, 3, 3, 3]) is True
    with pytest.raises(ValueError):
        erdos_gallai_check([0, 1])


def test_erdos_gallai_exhaustive():
    for p in range(1, 6):
        realised = {tuple(sorted(g.degrees(), reverse=True)) for g in all_subsets(p)}
        for seq in itertools.product(range(p), repeat=p):
            if list(seq) != sorted(seq, reverse=True):
                continue
            assert erdos_gallai_check(seq) == (seq in realised)


def test_adding_non_edge_to_tree_makes_one_cycle():
    for p in range(3, 7):
        for t in enumerate_trees(p):
            for u, v in itertools.combinations(range(p), 2):
                if t.has_edge(u, v):
                    continue
                census = enumerate_cycles(t.with_edge(u, v))
                assert sum(census.values()) == 1


def test_text_format_round_trip():
    g = LabeledGraph(5, [(3, 1), (0, 4)])
    text = format_graph(g)
    assert text.splitlines()[0] == "p 5"
    assert "1 3" in text.splitlines()
    assert parse_graph("# comment\n\np 5\n4 0\n\n1 3\n") == g
    assert parse_graph(text) == g
    with pytest.raises(ValueError):
        parse_graph("1 2\n")


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 9).flatmap(lambda p: st.tuples(st.just(p), st.lists(st.integers(0, p - 1), min_size=p - 2, max_size=p - 2))))
def test_prufer_bijection_property(args):
    p, seq = args
    t = prufer_decode(seq, p)
    assert is_tree(t)
    assert prufer_encode(t) == seq
    assert math.isclose(len(t.edges), p - 1)
