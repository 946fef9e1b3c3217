"""Simulation experiments: generate data from a known graph, run an explorer, score the result."""

from dataclasses import asdict, dataclass, field
import csv
import io
import math
import random

import numpy as np

from .chowliu import map_forest, map_tree
from .evalmetrics import confusion, posterior_expected_metrics
from .explorers import McmcConfig, Model, SssConfig, mcmc_run, sss_run
from .graph import LabeledGraph, chain, prufer_decode, read_graph, star
from .hiw import HiwParams, SuffStats
from .numerics import cov_from_graph, sample_mvn, star_validity
from .priors import Uniform, parse_prior
from .randgraph import sample_gnm

SHAPES = ("star", "chain", "file", "gnm")
ALGORITHMS = ("sss", "mcmc", "map")
METRICS = ("visited", "etpr", "top_tpr", "top_score", "top10_sum")
START_SEED = 20240601


@dataclass
class ExperimentSpec:
    shape: str = "star"
    p: int = 30
    n: int = 50
    r: float = None  # default 0.99 / sqrt(p - 1)
    replicates: int = 1
    algorithm: str = "sss"
    graph_class: str = "tree"
    seed: int = 0
    graph_file: str = None
    m: int = None  # edge count for gnm truths
    delta: float = 3.0
    dscale: float = None  # default delta + 2
    prior: str = "uniform"
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError("shape must be one of %s" % (SHAPES,))
        if self.algorithm not in ALGORITHMS:
            raise ValueError("algorithm must be one of %s" % (ALGORITHMS,))
        if self.graph_class not in ("forest", "tree"):
            raise ValueError("graph class must be forest or tree")
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if self.n < 0 or self.replicates < 1:
            raise ValueError("n must be >= 0 and replicates >= 1")
        if self.r is None:
            self.r = 0.99 / math.sqrt(self.p - 1)
        if self.shape == "star" and not star_validity([self.r] * (self.p - 1)):
            raise ValueError("partial correlation %g is too large for a star on %d nodes" % (self.r, self.p))


def truth_graph(spec: ExperimentSpec, seed) -> LabeledGraph:
    if spec.shape == "star":
        return star(spec.p)
    if spec.shape == "chain":
        return chain(spec.p)
    if spec.shape == "file":
        g = read_graph(spec.graph_file)
        if g.p != spec.p:
            raise ValueError("graph file has p=%d, expected %d" % (g.p, spec.p))
        return g
    m = spec.m if spec.m is not None else spec.p - 1
    return sample_gnm(spec.p, m, seed)


def gen_data(spec: ExperimentSpec, replicate: int = 0):
    """Dataset and generating graph for one replicate (seed = spec.seed + replicate)."""
    seed = spec.seed + replicate
    truth = truth_graph(spec, seed)
    sigma = cov_from_graph(truth, spec.r)
    return sample_mvn(sigma, spec.n, seed), truth


def fixed_start_tree(p: int) -> LabeledGraph:
    """A pseudo-random tree used as the common starting point for every run with this p."""
    rng = random.Random(START_SEED + p)
    if p == 2:
        return LabeledGraph(2, [(0, 1)])
    return prufer_decode([rng.randrange(p) for _ in range(p - 2)], p)


def build_model(spec: ExperimentSpec, x) -> Model:
    d = None if spec.dscale is None else spec.dscale * np.eye(spec.p)
    params = HiwParams(spec.p, spec.delta, d)
    stats = SuffStats.from_data(x) if len(x) else SuffStats.empty(spec.p)
    return Model(params, stats, parse_prior(spec.prior, spec.p))


def run_replicate(spec: ExperimentSpec, replicate: int) -> dict:
    x, truth = gen_data(spec, replicate)
    model = build_model(spec, x)
    seed = spec.seed + replicate
    start = fixed_start_tree(spec.p) if spec.graph_class == "tree" else LabeledGraph(spec.p)
    cfg = dict(spec.config)
    if spec.algorithm == "sss":
        rec = sss_run(spec.graph_class, start, SssConfig(seed=seed, **cfg), model)
    elif spec.algorithm == "mcmc":
        rec = mcmc_run(spec.graph_class, start, McmcConfig(seed=seed, **cfg), model)
    else:
        pick = map_tree if spec.graph_class == "tree" else map_forest
        g = pick(model.params, model.stats, model.prior)
        from .explorers import PosteriorRecord

        rec = PosteriorRecord(spec.p, spec.graph_class, "score", {g.bits: model.score(g)})
    if rec.kind == "score":
        scored = [(s, b) for b, s in rec.ledger.items()]
    else:
        scored = [(model.score_bits(b), b) for b in rec.ledger]
    scored.sort(key=lambda sb: (-sb[0], sb[1]))
    top_score, top_bits = scored[0]
    top = LabeledGraph.from_bits(spec.p, top_bits)
    n_true = len(truth.edges)
    metrics = posterior_expected_metrics(rec, truth)
    return {
        "replicate": replicate,
        "seed": seed,
        "shape": spec.shape,
        "p": spec.p,
        "n": spec.n,
        "algorithm": spec.algorithm,
        "class": spec.graph_class,
        "visited": len(rec.ledger),
        "etpr": metrics.etpr,
        "top_tpr": confusion(top, truth).tp / n_true if n_true else float("nan"),
        "top_score": float(top_score),
        "top10_sum": float(sum(s for s, _ in scored[:10])),
    }


def run_experiment(spec: ExperimentSpec) -> list:
    """One row per replicate, in replicate order."""
    return [run_replicate(spec, k) for k in range(spec.replicates)]


ROW_FIELDS = ("replicate", "seed", "shape", "p", "n", "algorithm", "class") + METRICS
GROUP_FIELDS = ("shape", "p", "n", "algorithm", "class")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow([repr(float(r[k])) if isinstance(r[k], (float, np.floating)) else r[k] for k in ROW_FIELDS])
    return buf.getvalue()


def rows_from_csv(text: str) -> list:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k in ROW_FIELDS:
            v = rec[k]
            if k in ("replicate", "seed", "p", "n", "visited"):
                row[k] = int(v)
            elif k in METRICS:
                row[k] = float(v)
            else:
                row[k] = v
        rows.append(row)
    return rows


def summarize(rows) -> str:
    """Median and quartiles of each metric per (shape, p, n, algorithm, class) group, as CSV."""
    groups = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in GROUP_FIELDS), []).append(r)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GROUP_FIELDS + ("metric", "count", "q25", "median", "q75"))
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        grp = groups[key]
        for m in METRICS:
            vals = np.array([float(r[m]) for r in grp])
            q25, med, q75 = np.percentile(vals, [25, 50, 75])
            w.writerow(list(key) + [m, len(vals), repr(float(q25)), repr(float(med)), repr(float(q75))])
    return buf.getvalue()


def spec_dict(spec: ExperimentSpec) -> dict:
    return asdict(spec)
