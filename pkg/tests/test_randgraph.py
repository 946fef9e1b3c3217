import collections
import itertools
import math
import random

import pytest

from treeggm.graph import LabeledGraph, complete, enumerate_trees
from treeggm.randgraph import (
    cycle_space_dimension,
    enumerate_cycles,
    girth,
    girth_tail_probability,
    monte_carlo_cycles,
    poisson_params,
    sample_gnm,
    sample_gnp,
)


def brute_cycles(g):
    """Count cycles by trying every cyclic order of every node subset.

    The smallest node is fixed first and the second node is required to be
    smaller than the last, so each cycle is seen once.
    """
    counts = collections.Counter()
    for k in range(3, g.p + 1):
        for nodes in itertools.combinations(range(g.p), k):
            first, rest = nodes[0], nodes[1:]
            for perm in itertools.permutations(rest):
                if perm[0] > perm[-1]:
                    continue
                ring = (first,) + perm
                if all(g.has_edge(ring[i], ring[(i + 1) % k]) for i in range(k)):
                    counts[k] += 1
    return dict(counts)


def test_samplers_edge_cases():
    assert sample_gnp(5, 0.0, 1).edges == frozenset()
    assert sample_gnp(5, 1.0, 1) == complete(5)
    assert sample_gnm(5, 10, 1) == complete(5)
    assert sample_gnp(7, 0.3, 4) == sample_gnp(7, 0.3, 4)
    with pytest.raises(ValueError):
        sample_gnp(5, 1.5, 0)
    with pytest.raises(ValueError):
        sample_gnm(4, 7, 0)


def test_gnm_degree_sum():
    for seed in range(50):
        g = sample_gnm(12, 17, seed)
        assert sum(g.degrees()) == 34


def test_gnm_uniform_over_subsets():
    n = 12000
    counts = collections.Counter(sample_gnm(4, 2, seed).bits for seed in range(n))
    assert len(counts) == 15
    q = 1 / 15
    for c in counts.values():
        assert abs(c - n * q) <= 4 * math.sqrt(n * q * (1 - q))


def test_cycle_examples():
    assert enumerate_cycles(complete(4)) == {3: 4, 4: 3}
    assert enumerate_cycles(complete(5)) == {3: 10, 4: 15, 5: 12}
    c5 = LabeledGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    assert enumerate_cycles(c5) == {5: 1}
    assert girth(c5) == 5
    for t in enumerate_trees(5):
        assert enumerate_cycles(t) == {} and girth(t) is None
    assert cycle_space_dimension(complete(5)) == 6


def test_cycle_guards():
    with pytest.raises(ValueError):
        enumerate_cycles(LabeledGraph(41))
    with pytest.raises(ValueError):
        enumerate_cycles(complete(9))  # dimension 28


def test_cycles_match_brute_force():
    rng = random.Random(0)
    for k in range(150):
        p = rng.randint(3, 7)
        g = sample_gnp(p, rng.uniform(0.2, 0.9), k)
        census = enumerate_cycles(g)
        assert census == brute_cycles(g)
        if census:
            assert min(census) == girth(g)
        else:
            assert girth(g) is None


def test_poisson_params_table_values():
    gnp = poisson_params("gnp", 10, range(3, 9))
    gnm = poisson_params("gnm", 5, range(3, 9))
    table = [167, 1250, 10000, 83333, 714286, 6250000]
    for i, expected in zip(range(3, 9), table):
        assert round(gnp[i]) == expected
        assert round(gnm[i]) == expected
    dense = poisson_params("gnp", 50, [3, 4])
    assert round(dense[3]) == 20833 and round(dense[4]) == 781250
    assert math.isclose(poisson_params("regular", 3, [3])[3], 8 / 6)


def test_degseq_regular_consistency():
    reg = poisson_params("regular", 4, range(3, 7))
    deg = poisson_params("degseq", [4] * 10, range(3, 7))
    for i in reg:
        assert math.isclose(reg[i], deg[i], rel_tol=1e-12)
    with pytest.raises(ValueError):
        poisson_params("degseq", [2, 2, 0], [3])
    with pytest.raises(ValueError):
        poisson_params("zipf", 2, [3])


def test_girth_tail_probability():
    assert math.isclose(girth_tail_probability(3, 3), math.exp(-8 / 6))
    assert girth_tail_probability(3, 2) == 1.0
    vals = [girth_tail_probability(4, g) for g in range(2, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_monte_carlo_small_and_degenerate():
    out = monte_carlo_cycles("gnm", 8, 0, 5, 0)
    assert all(v == (0.0, 0.0) for v in out.values())
    out = monte_carlo_cycles("gnp", 6, 1.0, 2, 0, max_length=4)
    assert out[3] == (20.0, 0.0) and out[4] == (45.0, 0.0)
    with pytest.raises(ValueError):
        monte_carlo_cycles("regular", 6, 3, 2, 0)


def test_monte_carlo_triangles_gnm_quick():
    # exact E[X3] for G(n, M) is C(n,3) * C(N-3, M-3) / C(N, M) with N = C(n,2)
    n, m = 30, 40
    big_n = n * (n - 1) // 2
    exact = math.comb(n, 3) * math.comb(big_n - 3, m - 3) / math.comb(big_n, m)
    mean, var = monte_carlo_cycles("gnm", n, m, 800, 1, max_length=3)[3]
    assert abs(mean - exact) <= 4 * math.sqrt(var / 800)
