"""Edge-recovery metrics for single graphs and for posterior summaries."""

from dataclasses import dataclass

import numpy as np

from .graph import LabeledGraph
from .mtt import TreePosteriorSummary


class UndefinedRate(ZeroDivisionError):
    """A rate whose denominator is zero."""


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def confusion(estimate: LabeledGraph, truth: LabeledGraph) -> Confusion:
    if estimate.p != truth.p:
        raise ValueError("graphs have different node counts")
    pairs = truth.p * (truth.p - 1) // 2
    tp = len(estimate.edges & truth.edges)
    fp = len(estimate.edges - truth.edges)
    fn = len(truth.edges - estimate.edges)
    return Confusion(tp, fp, fn, pairs - tp - fp - fn)


def _ratio(num, den, name):
    if den == 0:
        raise UndefinedRate("%s is undefined (zero denominator)" % name)
    return num / den


class Rates:
    """The seven rates of a confusion table; an undefined rate raises UndefinedRate on access."""

    NAMES = ("precision", "recall", "specificity", "fpr", "fnr", "accuracy", "error_rate")

    def __init__(self, c: Confusion):
        self.c = c

    @property
    def precision(self):
        return _ratio(self.c.tp, self.c.tp + self.c.fp, "precision")

    @property
    def recall(self):
        return _ratio(self.c.tp, self.c.tp + self.c.fn, "recall")

    @property
    def specificity(self):
        return _ratio(self.c.tn, self.c.tn + self.c.fp, "specificity")

    @property
    def fpr(self):
        return _ratio(self.c.fp, self.c.fp + self.c.tn, "false positive rate")

    @property
    def fnr(self):
        return _ratio(self.c.fn, self.c.fn + self.c.tp, "false negative rate")

    @property
    def accuracy(self):
        return _ratio(self.c.tp + self.c.tn, self.c.total, "accuracy")

    @property
    def error_rate(self):
        return _ratio(self.c.fp + self.c.fn, self.c.total, "error rate")

    def as_dict(self, undefined="n/a"):
        out = {}
        for name in self.NAMES:
            try:
                out[name] = getattr(self, name)
            except UndefinedRate:
                out[name] = undefined
        return out


def rates(c: Confusion) -> Rates:
    return Rates(c)


@dataclass
class ExpectedMetrics:
    etp: float
    efp: float
    efn: float
    etn: float
    etpr: float  # nan when the truth has no edges
    expected_degree: np.ndarray
    edge_prob: np.ndarray


def ledger_edge_probabilities(record):
    """Edge inclusion probabilities from a ledger normalised over its own entries."""
    keys, logw = record.log_weights()
    p = record.p
    m = p * (p - 1) // 2
    nbytes = max(1, (m + 7) // 8)
    raw = np.frombuffer(b"".join(k.to_bytes(nbytes, "little") for k in keys), dtype=np.uint8)
    present = np.unpackbits(raw.reshape(len(keys), nbytes), axis=1, bitorder="little")[:, :m]
    flat = np.exp(logw) @ present
    # bit i of a pattern is the pair (u, v), u < v, with i = v(v-1)/2 + u
    vs, us = np.tril_indices(p, -1)
    prob = np.zeros((p, p))
    prob[us, vs] = flat
    return prob + prob.T


def posterior_expected_metrics(source, truth: LabeledGraph) -> ExpectedMetrics:
    """Expected confusion counts under a posterior given as a ledger or an exact tree summary."""
    if isinstance(source, TreePosteriorSummary):
        prob = np.array(source.edge_prob, dtype=float)
    else:
        prob = ledger_edge_probabilities(source)
    p = prob.shape[0]
    if truth.p != p:
        raise ValueError("truth graph has the wrong number of nodes")
    in_truth = np.zeros((p, p), dtype=bool)
    for u, v in truth.edges:
        in_truth[u, v] = in_truth[v, u] = True
    upper = np.triu(np.ones((p, p), dtype=bool), 1)
    etp = float(np.sum(prob[upper & in_truth]))
    efp = float(np.sum(prob[upper & ~in_truth]))
    n_true = len(truth.edges)
    n_false = p * (p - 1) // 2 - n_true
    etpr = etp / n_true if n_true else float("nan")
    return ExpectedMetrics(etp, efp, n_true - etp, n_false - efp, etpr, prob.sum(axis=1), prob)
