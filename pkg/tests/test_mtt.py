import collections
import itertools
import math

import numpy as np
import pytest

from treeggm.graph import LabeledGraph, prufer_decode
from treeggm.mtt import (
    FORBIDDEN,
    DisconnectedSupport,
    FactoredTreeDist,
    edge_probabilities,
    expected_true_positives,
    log_partition,
    sample_tree,
)


def brute(lw):
    """Enumerate every tree through Prüfer sequences: (log Z, edge probability matrix)."""
    p = lw.shape[0]
    trees = [prufer_decode(s, p) for s in itertools.product(range(p), repeat=p - 2)]
    logs = np.array([sum(lw[u, v] for u, v in t.edges) for t in trees])
    top = logs.max()
    wts = np.exp(logs - top)
    z = wts.sum()
    prob = np.zeros((p, p))
    for t, wt in zip(trees, wts):
        for u, v in t.edges:
            prob[u, v] += wt / z
            prob[v, u] += wt / z
    return top + math.log(z), prob


def random_lw(p, seed, scale=2.0):
    a = np.random.default_rng(seed).standard_normal((p, p)) * scale
    lw = a + a.T
    np.fill_diagonal(lw, 0.0)
    return lw


def test_validation():
    with pytest.raises(ValueError):
        FactoredTreeDist(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        FactoredTreeDist(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        FactoredTreeDist(np.array([[0.0, np.inf], [np.inf, 0.0]]))


@pytest.mark.parametrize("p", [3, 4, 5, 6, 7, 8])
def test_cayley(p):
    assert math.isclose(log_partition(FactoredTreeDist(np.zeros((p, p)))), (p - 2) * math.log(p), rel_tol=1e-9)


def test_partition_and_probabilities_vs_brute_force():
    for p in (4, 5, 6):
        for seed in range(10):
            lw = random_lw(p, seed)
            d = FactoredTreeDist(lw)
            lz, prob = brute(lw)
            s = edge_probabilities(d)
            assert math.isclose(log_partition(d), lz, rel_tol=1e-10, abs_tol=1e-10)
            assert math.isclose(s.log_z, lz, rel_tol=1e-10, abs_tol=1e-10)
            assert np.max(np.abs(s.edge_prob - prob)) <= 1e-8
            assert math.isclose(s.edge_prob.sum() / 2, p - 1, abs_tol=1e-9)
            assert np.allclose(s.expected_degree, prob.sum(axis=1), atol=1e-8)


def test_large_weights_do_not_overflow():
    lw = random_lw(6, 3) + 2000.0
    np.fill_diagonal(lw, 0.0)
    lz, prob = brute(lw)
    s = edge_probabilities(FactoredTreeDist(lw))
    assert math.isclose(s.log_z, lz, rel_tol=1e-10)
    assert np.max(np.abs(s.edge_prob - prob)) <= 1e-8


def test_forbidden_edges():
    lw = np.zeros((4, 4))
    for u, v in ((0, 2), (1, 3)):
        lw[u, v] = lw[v, u] = FORBIDDEN
    lz, prob = brute(np.where(lw == FORBIDDEN, -1e6, lw))
    s = edge_probabilities(FactoredTreeDist(lw))
    assert math.isclose(math.exp(s.log_z), 4.0, rel_tol=1e-9)  # the 4-cycle has 4 spanning trees
    assert s.edge_prob[0, 2] == 0.0
    assert np.max(np.abs(s.edge_prob - prob)) <= 1e-8


def test_disconnected_support():
    lw = np.full((4, 4), -np.inf)
    lw[0, 1] = lw[1, 0] = lw[2, 3] = lw[3, 2] = 0.0
    with pytest.raises(DisconnectedSupport):
        log_partition(FactoredTreeDist(lw))
    with pytest.raises(DisconnectedSupport):
        edge_probabilities(FactoredTreeDist(np.full((3, 3), -np.inf)))


def test_expected_true_positives():
    s = edge_probabilities(FactoredTreeDist(np.zeros((4, 4))))
    etp, rate = expected_true_positives(s, LabeledGraph(4, [(0, 1), (1, 2), (2, 3)]))
    assert math.isclose(etp, 1.5) and math.isclose(rate, 0.5)
    with pytest.raises(ValueError):
        expected_true_positives(s, LabeledGraph(4))


def test_sampler_matches_distribution():
    p = 4
    lw = random_lw(p, 9, scale=0.7)
    d = FactoredTreeDist(lw)
    lz = log_partition(d)
    n = 40000
    counts = collections.Counter(sample_tree(d, seed).bits for seed in range(n))
    for s in itertools.product(range(p), repeat=p - 2):
        t = prufer_decode(s, p)
        q = math.exp(d.log_weight(t) - lz)
        sd = math.sqrt(n * q * (1 - q))
        assert abs(counts[t.bits] - n * q) <= 5 * sd + 1
    assert sample_tree(FactoredTreeDist(np.zeros((1, 1))), 0) == LabeledGraph(1)
