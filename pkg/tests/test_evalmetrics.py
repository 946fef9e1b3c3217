import math

import numpy as np
import pytest

from treeggm.evalmetrics import (
    Confusion,
    UndefinedRate,
    confusion,
    ledger_edge_probabilities,
    posterior_expected_metrics,
    rates,
)
from treeggm.explorers import PosteriorRecord
from treeggm.graph import LabeledGraph, chain, enumerate_trees, star
from treeggm.mtt import FactoredTreeDist, edge_probabilities


def test_confusion_example():
    c = confusion(LabeledGraph(4, [(0, 1), (1, 2), (0, 3)]), chain(4))
    assert c == Confusion(2, 1, 1, 2)
    assert c.total == 6
    with pytest.raises(ValueError):
        confusion(chain(3), chain(4))


def test_rates_example():
    r = rates(Confusion(2, 1, 1, 2))
    assert math.isclose(r.precision, 2 / 3)
    assert math.isclose(r.recall, 2 / 3)
    assert math.isclose(r.specificity, 2 / 3)
    assert math.isclose(r.fpr, 1 / 3)
    assert math.isclose(r.fnr, 1 / 3)
    assert math.isclose(r.accuracy, 4 / 6)
    assert math.isclose(r.error_rate, 2 / 6)


def test_undefined_rates():
    r = rates(confusion(LabeledGraph(3), LabeledGraph(3)))
    with pytest.raises(UndefinedRate):
        r.precision
    with pytest.raises(ZeroDivisionError):
        r.recall
    d = r.as_dict()
    assert d["precision"] == "n/a" and d["specificity"] == 1.0


def test_ledger_probabilities_simple():
    rec = PosteriorRecord(3, "tree", "count", {chain(3).bits: 3, star(3).bits: 1})
    prob = ledger_edge_probabilities(rec)
    assert math.isclose(prob[0, 1], 1.0)
    assert math.isclose(prob[1, 2], 0.75)
    assert math.isclose(prob[0, 2], 0.25)
    assert np.array_equal(prob, prob.T)


def test_dual_route_small():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5))
    lw = a + a.T
    np.fill_diagonal(lw, 0.0)
    d = FactoredTreeDist(lw)
    trees = list(enumerate_trees(5))
    rec = PosteriorRecord(5, "tree", "score", {t.bits: d.log_weight(t) for t in trees})
    truth = star(5)
    m1 = posterior_expected_metrics(rec, truth)
    m2 = posterior_expected_metrics(edge_probabilities(d), truth)
    for f in ("etp", "efp", "efn", "etn", "etpr"):
        assert math.isclose(getattr(m1, f), getattr(m2, f), abs_tol=1e-9)
    assert math.isclose(m1.etp + m1.efp, 4, abs_tol=1e-9)
    assert np.allclose(m1.expected_degree, m2.expected_degree, atol=1e-9)


def test_empty_truth_gives_nan_rate():
    rec = PosteriorRecord(3, "tree", "count", {chain(3).bits: 1})
    m = posterior_expected_metrics(rec, LabeledGraph(3))
    assert math.isnan(m.etpr) and m.etp == 0.0 and math.isclose(m.efp, 2.0)
    with pytest.raises(ValueError):
        posterior_expected_metrics(rec, chain(4))
