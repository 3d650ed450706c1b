"""Command-line interface: generate, simulate, estimate, theory, oracle,
experiment.

Thin adapters only: every subcommand parses flags, calls the library and
writes files; no numeric logic lives here.  Exit codes: 0 success, 1 usage
error, 2 data/validation error.  Randomness is controlled by --seed
(default from RSL_SEED, else 0).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import theory
from .centrality import estimate_source
from .errors import RslError
from .experiments import (ExperimentConfig, result_to_csv, result_to_gnuplot,
                          run_experiment)
from .generators import (GeometricTreeSpec, galton_watson, erdos_renyi,
                         geometric_tree, parse_offspring, random_regular,
                         regular_tree)
from .graphs import read_edgelist, write_edgelist
from .oracles import UrnState, polya_limit_samples, simulate_branching, simulate_renewal
from .spreading import (history_to_json, parse_dist, parse_stop, simulate_si)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rsl-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _default_seed() -> int:
    env = os.environ.get("RSL_SEED")
    return int(env) if env else 0


def _add_seed(p) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="master seed, 64-bit integer (default: $RSL_SEED or 0)")


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _build_parser() -> _Parser:
    top = _Parser(prog="rsl", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit an edge-list file for a graph family")
    g.add_argument("--family", required=True,
                   choices=["regular", "gw", "geometric", "er", "rrg"])
    g.add_argument("--d", type=int, help="degree (regular: tree degree; rrg: node degree)")
    g.add_argument("--radius", type=int, default=5,
                   help="materialization radius in hops for the regular tree (default 5)")
    g.add_argument("--d0", help="root offspring spec, e.g. poisson:3 or det:3 (gw)")
    g.add_argument("--doff", help="offspring spec for non-root nodes (gw)")
    g.add_argument("--max-nodes", type=int, default=1000,
                   help="node budget when materializing a random tree (default 1000)")
    g.add_argument("--alpha", type=float, help="polynomial growth exponent (geometric)")
    g.add_argument("--b", type=float, help="lower shell-count coefficient (geometric)")
    g.add_argument("--c", type=float,
                   help="upper shell coefficient (geometric) / mean degree (er)")
    g.add_argument("--dstar", type=int, help="root degree (geometric)")
    g.add_argument("--depth", type=int, help="tree depth in hops (geometric)")
    g.add_argument("--m", type=int, help="number of nodes (er, rrg)")
    _add_seed(g)
    g.add_argument("--out", help="output edge-list path (default stdout)")

    s = sub.add_parser("simulate", help="run one SI spreading and print its history as JSON")
    s.add_argument("--graph", help="edge-list file to spread on")
    s.add_argument("--source", type=int, default=0, help="source node id (default 0)")
    s.add_argument("--family", choices=["regular", "gw"],
                   help="lazy infinite-tree host instead of --graph")
    s.add_argument("--d", type=int, help="degree for --family regular")
    s.add_argument("--d0", help="root offspring spec for --family gw")
    s.add_argument("--doff", help="offspring spec for --family gw")
    s.add_argument("--dist", required=True,
                   help="delay distribution: exp:RATE, det:VALUE, unif:LO,HI, "
                        "gamma:SHAPE,RATE (times in abstract time units)")
    s.add_argument("--stop", required=True, help="stop rule: count:N or time:T")
    _add_seed(s)
    s.add_argument("--out", help="output JSON path (default stdout)")

    e = sub.add_parser("estimate", help="rank source candidates of an observed rumor graph")
    e.add_argument("--graph", required=True, help="edge-list file of the rumor graph")
    _add_seed(e)
    e.add_argument("--out", help="output CSV path (default stdout)")

    t = sub.add_parser("theory", help="closed-form detection/error tables as CSV")
    t.add_argument("--d", type=int, help="tree degree for the per-k table")
    t.add_argument("--kmax", type=int, default=20,
                   help="largest k in the per-k table (default 20)")
    t.add_argument("--alpha-table", action="store_true",
                   help="emit (d, alpha_d) for d = 3..dmax instead")
    t.add_argument("--dmax", type=int, default=50,
                   help="largest degree for --alpha-table (default 50)")
    t.add_argument("--out", help="output CSV path (default stdout)")

    o = sub.add_parser("oracle", help="run an independent stochastic-process oracle")
    osub = o.add_subparsers(dest="oracle", required=True)
    ou = osub.add_parser("urn", help="reinforced two-color urn fractions")
    ou.add_argument("--type1", type=int, required=True, help="initial type-1 balls")
    ou.add_argument("--type2", type=int, required=True, help="initial type-2 balls")
    ou.add_argument("--add", type=int, required=True, help="balls added per draw")
    ou.add_argument("--steps", type=int, required=True, help="draws per run")
    ou.add_argument("--runs", type=int, required=True, help="independent runs")
    _add_seed(ou)
    ou.add_argument("--out", help="output CSV path (default stdout)")
    ob = osub.add_parser("branching", help="continuous-time branching population")
    ob.add_argument("--offspring", required=True, help="offspring spec, e.g. det:2")
    ob.add_argument("--dist", required=True, help="lifetime distribution (see simulate)")
    ob.add_argument("--times", required=True,
                    help="comma-separated sample times, e.g. 1,2,4")
    ob.add_argument("--runs", type=int, required=True, help="independent runs")
    _add_seed(ob)
    ob.add_argument("--out", help="output CSV path (default stdout)")
    orn = osub.add_parser("renewal", help="renewal counts by a horizon")
    orn.add_argument("--dist", required=True, help="holding-time distribution")
    orn.add_argument("--t", type=float, required=True, help="horizon in time units")
    orn.add_argument("--runs", type=int, required=True, help="independent runs")
    _add_seed(orn)
    orn.add_argument("--out", help="output CSV path (default stdout)")

    x = sub.add_parser("experiment", help="Monte Carlo detection experiment from a JSON config")
    x.add_argument("--config", required=True,
                   help="JSON file: {family, family_params, dist, stop, trials, "
                        "master_seed, k_max}")
    x.add_argument("--workers", type=int, default=0,
                   help="worker processes (default: available parallelism); "
                        "output is independent of this")
    x.add_argument("--out", help="output CSV path (default stdout)")
    x.add_argument("--gnuplot", help="also write a plot-ready data file here")
    return top


def _cmd_generate(args) -> None:
    seed = _seed_of(args)
    fam = args.family
    if fam == "regular":
        if args.d is None:
            raise _UsageError("--family regular needs --d")
        g = regular_tree(args.d).materialize(args.radius)
    elif fam == "gw":
        if not args.d0 or not args.doff:
            raise _UsageError("--family gw needs --d0 and --doff")
        gen = galton_watson(parse_offspring(args.d0), parse_offspring(args.doff), seed)
        g = gen.materialize(args.max_nodes)
    elif fam == "geometric":
        if None in (args.alpha, args.b, args.c, args.dstar, args.depth):
            raise _UsageError("--family geometric needs --alpha --b --c --dstar --depth")
        spec = GeometricTreeSpec(alpha=args.alpha, b=args.b, c=args.c,
                                 root_degree=args.dstar, depth=args.depth)
        g = geometric_tree(spec, seed).graph
    elif fam == "er":
        if args.m is None or args.c is None:
            raise _UsageError("--family er needs --m and --c")
        g = erdos_renyi(args.m, args.c, seed)
    else:
        if args.m is None or args.d is None:
            raise _UsageError("--family rrg needs --m and --d")
        g = random_regular(args.m, args.d, seed)
    import io

    buf = io.StringIO()
    write_edgelist(g, buf)
    _emit(args.out, buf.getvalue())


def _cmd_simulate(args) -> None:
    seed = _seed_of(args)
    if args.graph:
        host = read_edgelist(args.graph)
    elif args.family == "regular":
        if args.d is None:
            raise _UsageError("--family regular needs --d")
        host = regular_tree(args.d)
    elif args.family == "gw":
        if not args.d0 or not args.doff:
            raise _UsageError("--family gw needs --d0 and --doff")
        host = galton_watson(parse_offspring(args.d0), parse_offspring(args.doff), seed)
    else:
        raise _UsageError("simulate needs --graph or --family")
    h = simulate_si(host, args.source, parse_dist(args.dist),
                    parse_stop(args.stop), seed)
    _emit(args.out, history_to_json(h) + "\n")


def _cmd_estimate(args) -> None:
    g = read_edgelist(args.graph)
    chosen, report = estimate_source(g, _seed_of(args))
    rank = np.empty(report.n, dtype=np.int64)
    rank[report.ranking] = np.arange(1, report.n + 1)
    centers = set(report.centers)
    lines = ["node,log_centrality,rank,is_center"]
    for v in range(report.n):
        lines.append(f"{v},{report.log_centrality[v]:.12g},{rank[v]},"
                     f"{1 if v in centers else 0}")
    _emit(args.out, "\n".join(lines) + "\n")


def _cmd_theory(args) -> None:
    if args.alpha_table:
        lines = ["d,alpha_d"]
        for d in range(3, args.dmax + 1):
            lines.append(f"{d},{theory.alpha_d(d):.12g}")
    else:
        if args.d is None:
            raise _UsageError("theory needs --d (or --alpha-table)")
        lines = ["d,k,ck_limit,ck_upper_bound"]
        for k in range(1, args.kmax + 1):
            lines.append(f"{args.d},{k},{theory.ck_limit(args.d, k):.12g},"
                         f"{theory.ck_upper_bound(k):.12g}")
    _emit(args.out, "\n".join(lines) + "\n")


def _cmd_oracle(args) -> None:
    seed = _seed_of(args)
    if args.oracle == "urn":
        samples = polya_limit_samples(UrnState(args.type1, args.type2, args.add),
                                      args.steps, args.runs, seed)
        lines = ["run,fraction"]
        lines += [f"{i},{x:.12g}" for i, x in enumerate(samples)]
    elif args.oracle == "branching":
        times = [float(x) for x in args.times.split(",")]
        lines = ["run,t,population"]
        for i in range(args.runs):
            trace = simulate_branching(parse_offspring(args.offspring),
                                       parse_dist(args.dist), times, seed + i)
            for t, z in zip(trace.sample_times, trace.counts):
                lines.append(f"{i},{t:.12g},{int(z)}")
    else:
        lines = ["run,count"]
        for i in range(args.runs):
            c = simulate_renewal(parse_dist(args.dist), args.t, seed + i)
            lines.append(f"{i},{c}")
    _emit(args.out, "\n".join(lines) + "\n")


def _cmd_experiment(args) -> None:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = ExperimentConfig.from_dict(json.load(fh))
    workers = args.workers if args.workers > 0 else (os.cpu_count() or 1)
    result = run_experiment(cfg, workers=workers)
    _emit(args.out, result_to_csv(result))
    if args.gnuplot:
        _atomic_write(args.gnuplot, result_to_gnuplot(result))


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        handler = {
            "generate": _cmd_generate,
            "simulate": _cmd_simulate,
            "estimate": _cmd_estimate,
            "theory": _cmd_theory,
            "oracle": _cmd_oracle,
            "experiment": _cmd_experiment,
        }[args.command]
        handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except RslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
