"""Command-line interface.

Every subcommand prints a JSON document with the package version, the full
flag set, the seed, the wall time and a ``result`` block.  Exit status is 0
on success, 2 for invalid input and 3 for numerical failures.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .chordal import eliminate, is_minimal, min_degree_ordering, recursive_thin_ii, recursive_thin_iii
from .chowliu import chow_liu_gaussian_weights, kruskal_max_tree, map_forest, map_tree, posterior_edge_weights
from .evalmetrics import confusion, posterior_expected_metrics, rates
from .experiment import ExperimentSpec, fixed_start_tree, gen_data, rows_to_csv, run_experiment, summarize
from .explorers import McmcConfig, Model, PosteriorRecord, SssConfig, mcmc_run, sss_run
from .graph import LabeledGraph, enumerate_forests, enumerate_trees, format_graph, read_graph, write_graph
from .hiw import HiwParams, SuffStats
from .mtt import DisconnectedSupport, FactoredTreeDist, edge_probabilities, expected_true_positives
from .numerics import NotPositiveDefinite, read_matrix, write_matrix
from .priors import parse_prior
from .randgraph import monte_carlo_cycles, poisson_params
from .chordal import count_decomposable

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class NumericalFailure(RuntimeError):
    pass


def _add_model_flags(sp):
    sp.add_argument("--data", required=True, help="CSV dataset, one observation per row")
    sp.add_argument("--delta", type=float, default=3.0)
    sp.add_argument("--dscale", type=float, default=None, help="D = dscale * I (default delta + 2)")
    sp.add_argument("--dfile", default=None, help="CSV file holding D")
    sp.add_argument("--prior", default="uniform")
    sp.add_argument("--center", action="store_true", help="center columns before forming X^T X")


def _add_output_flags(sp):
    sp.add_argument("--out", default=None, help="main output file")
    sp.add_argument("--json-out", default=None, help="write the JSON report here instead of stdout")


def _model(args):
    x = read_matrix(args.data)
    p = x.shape[1]
    if args.dfile:
        d = read_matrix(args.dfile)
    elif args.dscale is not None:
        d = args.dscale * np.eye(p)
    else:
        d = None
    params = HiwParams(p, args.delta, d)
    stats = SuffStats.from_data(x, center=args.center)
    return Model(params, stats, parse_prior(args.prior, p))


def _edges(g):
    return [list(e) for e in g.sorted_edges()]


def _record_json(rec: PosteriorRecord):
    return {
        "p": rec.p,
        "class": rec.graph_class,
        "kind": rec.kind,
        "ledger": {str(k): v for k, v in sorted(rec.ledger.items())},
    }


def _record_from_json(obj):
    return PosteriorRecord(obj["p"], obj["class"], obj["kind"], {int(k): v for k, v in obj["ledger"].items()})


def _posterior_block(rec, model, truth, top):
    best = rec.best if rec.kind == "score" else [(g, model.score(g)) for g, _ in rec.top_graphs(top)]
    out = {
        "top": [{"edges": _edges(g), "score": s} for g, s in best[:top]],
        "visited": len(rec.ledger),
        "info": {k: v for k, v in rec.info.items()},
    }
    metrics = posterior_expected_metrics(rec, LabeledGraph(rec.p) if truth is None else truth)
    out["edge_prob"] = metrics.edge_prob.tolist()
    if truth is not None:
        out["etp"] = metrics.etp
        out["etpr"] = metrics.etpr
    return out


def _write_trace(path, trace):
    with open(path, "w") as fh:
        fh.write("iteration,score\n")
        for i, s in enumerate(trace):
            fh.write("%d,%r\n" % (i, s))


def cmd_gen_data(args):
    spec = ExperimentSpec(shape=args.shape, p=args.p, n=args.n, r=args.r, seed=args.seed, graph_file=args.graph, m=args.m)
    x, truth = gen_data(spec)
    if args.out:
        write_matrix(x, args.out)
    if args.truth_out:
        write_graph(truth, args.truth_out)
    return {"n": int(x.shape[0]), "p": spec.p, "r": spec.r, "truth": _edges(truth)}


def cmd_chow_liu(args):
    x = read_matrix(args.data)
    g = kruskal_max_tree(chow_liu_gaussian_weights(x))
    if args.out:
        write_graph(g, args.out)
    return {"edges": _edges(g)}


def cmd_map_forest(args):
    model = _model(args)
    pick = map_tree if args.graph_class == "tree" else map_forest
    g = pick(model.params, model.stats, model.prior)
    if args.out:
        write_graph(g, args.out)
    return {"class": args.graph_class, "edges": _edges(g), "score": model.score(g)}


def cmd_mtt_summary(args):
    model = _model(args)
    lw = posterior_edge_weights(model.params, model.stats, model.prior, model.hiw)
    s = edge_probabilities(FactoredTreeDist(lw))
    out = {"log_z": s.log_z, "edge_prob": s.edge_prob.tolist(), "expected_degree": s.expected_degree.tolist()}
    if args.truth:
        etp, etpr = expected_true_positives(s, read_graph(args.truth))
        out.update(etp=etp, etpr=etpr)
    return out


def _start_graph(args, p):
    if args.start:
        return read_graph(args.start)
    return fixed_start_tree(p) if args.graph_class == "tree" else LabeledGraph(p)


def cmd_sss(args):
    model = _model(args)
    omega = None if args.omega == "all" else int(args.omega)
    cfg = SssConfig(omega=omega, iterations=args.iters, seconds=args.seconds, system=args.system, seed=args.seed, top=args.top)
    rec = sss_run(args.graph_class, _start_graph(args, model.p), cfg, model)
    return _finish_run(args, rec, model)


def cmd_mcmc(args):
    model = _model(args)
    cfg = McmcConfig(
        sigma_g=args.sigma_g, sigma_ij=args.sigma_ij, iterations=args.iters, seconds=args.seconds,
        system=args.system, seed=args.seed, top=args.top,
    )
    rec = mcmc_run(args.graph_class, _start_graph(args, model.p), cfg, model)
    return _finish_run(args, rec, model)


def _finish_run(args, rec, model):
    truth = read_graph(args.truth) if args.truth else None
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(_record_json(rec), fh)
    if args.trace_out:
        _write_trace(args.trace_out, rec.trace)
    return _posterior_block(rec, model, truth, args.top)


def cmd_thin(args):
    g = read_graph(args.graph)
    order = list(range(g.p)) if args.order == "natural" else min_degree_ordering(g)
    tri = eliminate(g, order)
    thin = recursive_thin_ii if args.algorithm == "ii" else recursive_thin_iii
    passes = []
    t0 = time.perf_counter()
    out = thin(tri, passes)
    elapsed = time.perf_counter() - t0
    minimal = is_minimal(out)
    text = "p %d\n" % g.p + "".join("%d %d\n" % e for e in sorted(out.fill))
    text += "# minimal=%s fill_before=%d fill_after=%d\n" % (minimal, len(tri.fill), len(out.fill))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return {
        "fill_before": sorted(list(e) for e in tri.fill),
        "fill_after": sorted(list(e) for e in out.fill),
        "minimal": minimal,
        "passes": len(passes),
        "thin_seconds": elapsed,
    }


def cmd_count_cycles(args):
    if args.gnp:
        n, prob = int(args.gnp[0]), float(args.gnp[1])
        model, param, lam = "gnp", prob, poisson_params("gnp", n * prob, range(3, n + 1))
    elif args.gnm:
        n, m = int(args.gnm[0]), int(args.gnm[1])
        model, param, lam = "gnm", m, poisson_params("gnm", m / n, range(3, n + 1))
    else:
        raise ValueError("give --gnp N P or --gnm N M")
    res = monte_carlo_cycles(model, n, param, args.samples, args.seed, args.max_length)
    lines = ["length,empirical_mean,lambda"]
    for i in sorted(res):
        lines.append("%d,%r,%r" % (i, res[i][0], lam[i]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return {str(i): {"mean": res[i][0], "variance": res[i][1], "lambda": lam[i]} for i in sorted(res)}


def cmd_enumerate(args):
    if args.kind == "trees":
        graphs = list(enumerate_trees(args.p))
    elif args.kind == "forests":
        graphs = list(enumerate_forests(args.p))
    else:
        return {"kind": args.kind, "p": args.p, "count": count_decomposable(args.p)}
    if args.out:
        with open(args.out, "w") as fh:
            for g in graphs:
                fh.write(format_graph(g) + "\n")
    return {"kind": args.kind, "p": args.p, "count": len(graphs)}


def cmd_eval(args):
    truth = read_graph(args.truth)
    if args.graph:
        c = confusion(read_graph(args.graph), truth)
        result = {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn}
        result.update(rates(c).as_dict())
    else:
        with open(args.ledger) as fh:
            rec = _record_from_json(json.load(fh))
        m = posterior_expected_metrics(rec, truth)
        result = {"etp": m.etp, "efp": m.efp, "efn": m.efn, "etn": m.etn, "etpr": m.etpr}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("metric,value\n")
            for k, v in result.items():
                fh.write("%s,%s\n" % (k, v if isinstance(v, str) else repr(v)))
    return result


def cmd_experiment(args):
    config = {}
    if args.algorithm == "sss":
        config = {"omega": None if args.omega == "all" else int(args.omega), "system": args.system}
    elif args.algorithm == "mcmc":
        config = {"sigma_g": args.sigma_g, "sigma_ij": args.sigma_ij, "system": args.system}
    if args.algorithm != "map":
        config.update(iterations=args.iters, seconds=args.seconds)
    rows = []
    for n in args.n:
        spec = ExperimentSpec(
            shape=args.shape, p=args.p, n=n, r=args.r, replicates=args.replicates, algorithm=args.algorithm,
            graph_class=args.graph_class, seed=args.seed, graph_file=args.graph, m=args.m, delta=args.delta,
            dscale=args.dscale, prior=args.prior, config=config,
        )
        rows.extend(run_experiment(spec))
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    summary = summarize(rows)
    if args.summary_out:
        with open(args.summary_out, "w") as fh:
            fh.write(summary)
    return {"rows": len(rows), "summary": summary}


def build_parser():
    ap = argparse.ArgumentParser(prog="treeggm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-data", help="simulate data from a star, chain, file or G(n,M) graph")
    sp.add_argument("--shape", choices=("star", "chain", "file", "gnm"), default="star")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, default=None, help="partial correlation on edges (default 0.99/sqrt(p-1))")
    sp.add_argument("--graph", default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--truth-out", default=None)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_gen_data)

    sp = sub.add_parser("chow-liu", help="maximum mutual-information spanning tree")
    sp.add_argument("--data", required=True)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_chow_liu, seed=None)

    sp = sub.add_parser("map-forest", help="exact MAP forest or tree")
    _add_model_flags(sp)
    sp.add_argument("--class", dest="graph_class", choices=("forest", "tree"), default="forest")
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_map_forest, seed=None)

    sp = sub.add_parser("mtt-summary", help="exact edge posteriors over trees")
    _add_model_flags(sp)
    sp.add_argument("--truth", default=None)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_mtt_summary, seed=None)

    for name, func in (("sss", cmd_sss), ("mcmc", cmd_mcmc)):
        sp = sub.add_parser(name, help="stochastic shotgun search" if name == "sss" else "reversible-jump MCMC")
        _add_model_flags(sp)
        sp.add_argument("--class", dest="graph_class", choices=("forest", "tree"), default="tree")
        sp.add_argument("--iters", type=int, default=1000)
        sp.add_argument("--seconds", type=float, default=None)
        sp.add_argument("--system", choices=("a", "b", "c", "d", "A", "B", "C", "D"), default="a")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--top", type=int, default=10)
        sp.add_argument("--truth", default=None)
        sp.add_argument("--start", default=None)
        sp.add_argument("--trace-out", default=None)
        if name == "sss":
            sp.add_argument("--omega", default="all", help="proposals per step, or 'all'")
        else:
            sp.add_argument("--sigma-g", type=float, default=0.3)
            sp.add_argument("--sigma-ij", type=float, default=0.01)
        _add_output_flags(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("thin", help="eliminate, then thin the fill to a minimal triangulation")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--order", choices=("natural", "mindeg"), default="natural")
    sp.add_argument("--algorithm", choices=("ii", "iii"), default="iii")
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_thin, seed=None)

    sp = sub.add_parser("count-cycles", help="Monte Carlo cycle counts against Poisson limits")
    sp.add_argument("--gnp", nargs=2, metavar=("N", "P"))
    sp.add_argument("--gnm", nargs=2, metavar=("N", "M"))
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--max-length", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_count_cycles)

    sp = sub.add_parser("enumerate", help="enumerate trees or forests, or count decomposable graphs")
    sp.add_argument("--kind", choices=("trees", "forests", "decomposable"), default="trees")
    sp.add_argument("--p", type=int, required=True)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_enumerate, seed=None)

    sp = sub.add_parser("eval", help="metrics of a graph or a ledger against the truth")
    sp.add_argument("--truth", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph")
    g.add_argument("--ledger")
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_eval, seed=None)

    sp = sub.add_parser("experiment", help="replicated simulation study")
    sp.add_argument("--shape", choices=("star", "chain", "file", "gnm"), default="star")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--replicates", type=int, default=1)
    sp.add_argument("--algorithm", choices=("sss", "mcmc", "map"), default="sss")
    sp.add_argument("--class", dest="graph_class", choices=("forest", "tree"), default="tree")
    sp.add_argument("--graph", default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--delta", type=float, default=3.0)
    sp.add_argument("--dscale", type=float, default=None)
    sp.add_argument("--prior", default="uniform")
    sp.add_argument("--omega", default="all")
    sp.add_argument("--system", default="A")
    sp.add_argument("--sigma-g", type=float, default=0.3)
    sp.add_argument("--sigma-ij", type=float, default=0.01)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--seconds", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--summary-out", default=None)
    _add_output_flags(sp)
    sp.set_defaults(func=cmd_experiment)
    return ap


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(x.item())
    return x


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    t0 = time.perf_counter()
    try:
        result = args.func(args)
    except (NotPositiveDefinite, DisconnectedSupport, np.linalg.LinAlgError, FloatingPointError, NumericalFailure) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        print("invalid input: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    report = {
        "version": __version__,
        "command": args.command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "wall_time": time.perf_counter() - t0,
        "result": result,
    }
    text = json.dumps(_jsonable(report), indent=2)
    if getattr(args, "json_out", None):
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
