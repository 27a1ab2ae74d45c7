"""Command-line entry point.

Subcommands: stats, pagerank, analyze, predict, simulate, generate.
Exit codes: 0 success, 2 usage/validation error, 3 data error,
4 non-convergence.  Option precedence is flags > --config JSON > defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import report as report_mod
from . import simulate as sim
from . import theory
from .graph import (DegreeProfile, EdgeListParseError, degree_profile, load_edge_list,
                    parse_hist, write_edge_list)
from .pagerank import PageRankParams, export_scores, pagerank
from .simulate import ModelSpec, SimulationConvergenceError
from .synth import SynthSpec, generate
from .tails import TailFit, ccdf, decimate_ccdf, write_ccdf_csv

_DEFAULTS = {
    "damping": [0.85],
    "tol": 1e-10,
    "max_iters": 200,
    "snapshots": [],
    "xmin": None,
    "alpha": None,
    "seed": 0,
    "threads": 1,
    "output_dir": ".",
    "iters": "converged",
    "k_max": None,
    "drop_self_loops": False,
}


def _add_common(p, *names):
    if "graph" in names:
        p.add_argument("graph", help="edge-list file ('src dst' lines, optionally .gz)")
        p.add_argument("--drop-self-loops", action="store_true", default=None)
    if "damping" in names:
        p.add_argument("--damping", type=float, action="append",
                       help="damping factor; repeat for several runs")
    if "iterate" in names:
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iters", type=int)
        p.add_argument("--snapshots", type=int, nargs="*",
                       help="iteration indices whose score vectors are retained")
    if "fit" in names:
        p.add_argument("--xmin", type=float, help="tail threshold override")
        p.add_argument("--alpha", type=float, help="cumulative exponent override")
    if "outdir" in names:
        p.add_argument("--output-dir", type=str)
    p.add_argument("--threads", type=int)
    p.add_argument("--config", type=str, help="JSON file with option defaults")


class _Options:
    """Flag > config-file > built-in default resolution."""

    def __init__(self, args):
        self.args = args
        self.config = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="utf-8") as fh:
                self.config = json.load(fh)
            if not isinstance(self.config, dict):
                raise ValueError("config file must hold a JSON object")

    def get(self, key):
        val = getattr(self.args, key, None)
        if val is not None:
            return val
        if key in self.config:
            return self.config[key]
        return _DEFAULTS[key]


def _validate_common(opts) -> None:
    threads = int(opts.get("threads"))
    if threads < 1:
        raise ValueError("--threads must be >= 1")
    if threads > 1:
        print("note: execution is vectorized in-process; --threads > 1 has no effect",
              file=sys.stderr)
    alpha = opts.get("alpha")
    if alpha is not None and not 0.5 < float(alpha) < 3.0:
        raise ValueError(f"--alpha {alpha} outside (0.5, 3); pass the cumulative "
                         "(CCDF) exponent, not the density exponent")


def _load_graph(args, opts):
    return load_edge_list(args.graph, drop_self_loops=bool(opts.get("drop_self_loops")))


def cmd_stats(args, opts) -> int:
    g = _load_graph(args, opts)
    text = degree_profile(g).to_json()
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_pagerank(args, opts) -> int:
    g = _load_graph(args, opts)
    outdir = Path(opts.get("output_dir"))
    outdir.mkdir(parents=True, exist_ok=True)
    all_converged = True
    for c in opts.get("damping"):
        params = PageRankParams(c=c, tol=opts.get("tol"),
                                max_iters=int(opts.get("max_iters")),
                                snapshot_iters=frozenset(opts.get("snapshots")))
        result = pagerank(g, params)
        key = repr(float(c))
        export_scores(g, result.scores, outdir / f"scores_c{key}.csv")
        for k, vec in sorted(result.snapshots.items()):
            export_scores(g, vec, outdir / f"scores_c{key}_iter{k}.csv")
        if not result.converged:
            all_converged = False
            print(f"warning: c={key} not converged after {result.iters_run} iterations "
                  f"(residual {result.residuals[-1]:.3e})", file=sys.stderr)
    return 0 if all_converged else 4


def cmd_analyze(args, opts) -> int:
    g = _load_graph(args, opts)
    options = report_mod.AnalysisOptions(
        dampings=[float(c) for c in opts.get("damping")],
        tol=float(opts.get("tol")),
        max_iters=int(opts.get("max_iters")),
        snapshot_iters=[int(k) for k in opts.get("snapshots")],
        xmin=opts.get("xmin"),
        alpha=opts.get("alpha"))
    rep, dists = report_mod.analyze_graph(g, options)
    path = report_mod.write_analysis(rep, dists, opts.get("output_dir"))
    print(f"report written to {path}")
    not_conv = [key for key, entry in rep["pagerank"].items() if not entry["converged"]]
    if not_conv:
        print(f"warning: not converged for damping {not_conv}", file=sys.stderr)
        return 4
    return 0


def cmd_predict(args, opts) -> int:
    alpha = opts.get("alpha")
    if alpha is None:
        raise ValueError("--alpha is required for predict")
    alpha = float(alpha)
    tables = {}
    lines = []
    for c in opts.get("damping"):
        if args.profile:
            profile = DegreeProfile.from_json(Path(args.profile).read_text(encoding="utf-8"))
            params = theory.TheoryParams.from_profile(profile, c=c, alpha=alpha)
        else:
            if args.d is None or args.b is None:
                raise ValueError("predict needs --profile, or --d, --p0 and --b")
            params = theory.TheoryParams(c=c, alpha=alpha, d=args.d,
                                         p0=args.p0 if args.p0 is not None else 0.0,
                                         b=args.b)
        table = theory.coefficient_table(params, k_max=opts.get("k_max"))
        tables[repr(float(c))] = json.loads(table.to_json())
        if args.indegree_intercept is not None:
            fit = TailFit(alpha_hat=alpha, x_min=1.0,
                          intercept=args.indegree_intercept, tail_count=0)
            slope, intercept = theory.predict_line(fit, table.c_limit)
            lines.append({"c": c, "k": "limit", "slope": slope, "intercept": intercept})
            for k, ck in enumerate(table.c_k, 1):
                slope, intercept = theory.predict_line(fit, ck)
                lines.append({"c": c, "k": k, "slope": slope, "intercept": intercept})
    out = {"coefficients": tables}
    if lines:
        out["predicted_lines"] = lines
    text = json.dumps(out, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_simulate(args, opts) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("model spec must be a JSON object")
    if getattr(args, "seed", None) is not None:
        obj["seed"] = args.seed
    spec = ModelSpec.from_dict(obj)
    iters = opts.get("iters")
    if iters != "converged":
        iters = int(iters)
    pool = sim.simulate_R(spec, iters)

    outdir = Path(opts.get("output_dir"))
    outdir.mkdir(parents=True, exist_ok=True)
    write_ccdf_csv(decimate_ccdf(ccdf(pool.values)), outdir / "pool_ccdf.csv")

    mean = float(pool.values.mean())
    lower = spec.baseline
    mean_band = 5.0 / math.sqrt(spec.pool_size)
    summary = {
        "schema_version": report_mod.SCHEMA_VERSION,
        "spec": json.loads(spec.to_json()),
        "generations": pool.generation,
        "pool_mean": mean,
        "pool_min": float(pool.values.min()),
        "pool_max": float(pool.values.max()),
        "degenerate": bool(pool.values.min() == pool.values.max()),
        "invariants": {
            "values_at_least_baseline": bool(pool.values.min() >= lower - 1e-12),
            "mean_within_5_over_sqrt_M": bool(abs(mean - 1.0) <= mean_band),
        },
    }
    if spec.c > 0 and spec.alpha > 1.0:
        tparams = theory.TheoryParams.from_histogram(spec.c, spec.alpha,
                                                     spec.outdeg_hist, d=spec.d)
        c_value = (theory.coefficient_C(tparams) if iters == "converged"
                   else theory.coefficient_Ck(tparams, iters))
        rows = sim.tail_ratio_table(pool, spec, c_value)
        checked = [r for r in rows if r["in_window"]]
        summary["tail_ratios"] = {
            "coefficient": c_value,
            "rows": rows,
            "within_band": (bool(all(0.8 <= r["ratio"] <= 1.25 for r in checked))
                            if checked else None),
        }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                         encoding="utf-8")
    print(json.dumps(summary["invariants"], indent=2))
    return 0


def cmd_generate(args, opts) -> int:
    hist_text = args.outdeg_hist
    if hist_text.startswith("@"):
        hist_text = Path(hist_text[1:]).read_text(encoding="utf-8")
    hist = parse_hist(json.loads(hist_text))
    spec = SynthSpec(n=args.nodes, alpha=args.alpha_gen, d=args.mean_degree,
                     outdeg_hist=hist, seed=int(opts.get("seed")),
                     fixed_indegree=args.fixed_indegree)
    g = generate(spec)
    outdir = Path(opts.get("output_dir"))
    outdir.mkdir(parents=True, exist_ok=True)
    edges_path = outdir / ("edges.txt.gz" if args.gzip else "edges.txt")
    write_edge_list(g, edges_path)
    profile = degree_profile(g)
    sidecar = {
        "spec": {"n": spec.n, "alpha": spec.alpha, "d": spec.d,
                 "outdeg_hist": {str(j): p for j, p in sorted(spec.outdeg_hist.items())},
                 "seed": spec.seed, "fixed_indegree": spec.fixed_indegree},
        "realized_profile": json.loads(profile.to_json()),
    }
    (outdir / "synth.json").write_text(json.dumps(sidecar, indent=2) + "\n",
                                       encoding="utf-8")
    print(f"wrote {edges_path} (n={g.n}, m={g.m})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ranktail",
        description="PageRank computation, heavy-tail fitting, tail-coefficient "
                    "prediction, and Monte Carlo validation for directed graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="degree statistics of an edge-list graph")
    _add_common(p, "graph")
    p.add_argument("--output", type=str)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pagerank", help="power-iteration scores to CSV")
    _add_common(p, "graph", "damping", "iterate", "outdir")
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("analyze", help="full pipeline: stats, fits, coefficients, residuals")
    _add_common(p, "graph", "damping", "iterate", "fit", "outdir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="coefficient table and predicted log-log lines")
    _add_common(p, "damping")
    p.add_argument("--alpha", type=float, help="cumulative tail exponent")
    p.add_argument("--profile", type=str, help="degree-profile JSON from 'stats'")
    p.add_argument("--d", type=float, help="mean degree (when no profile)")
    p.add_argument("--p0", type=float, help="dangling fraction (when no profile)")
    p.add_argument("--b", type=float, help="out-degree tail factor (when no profile)")
    p.add_argument("--k-max", type=int, dest="k_max")
    p.add_argument("--indegree-intercept", type=float,
                   help="in-degree log-log intercept; enables predicted lines")
    p.add_argument("--output", type=str)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="population-dynamics run from a model-spec JSON")
    p.add_argument("spec", help="ModelSpec JSON file")
    p.add_argument("--iters", type=str, help="generation count or 'converged'")
    p.add_argument("--seed", type=int)
    _add_common(p, "outdir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="synthesize a heavy-tailed random graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True, dest="alpha_gen")
    p.add_argument("--mean-degree", type=float, required=True)
    p.add_argument("--outdeg-hist", type=str, required=True,
                   help="JSON histogram {degree: fraction} or @file")
    p.add_argument("--fixed-indegree", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gzip", action="store_true")
    _add_common(p, "outdir")
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        opts = _Options(args)
        _validate_common(opts)
        return args.func(args, opts)
    except EdgeListParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, IsADirectoryError, PermissionError,
            json.JSONDecodeError, UnicodeDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SimulationConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
