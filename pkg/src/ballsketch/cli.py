"""Command-line front end: every pipeline stage as a subcommand.

Outputs are machine-readable CSV (or an edge list for ``gen``); a JSON
run manifest goes to stderr, or to a file with ``--manifest``. Identical
manifests reproduce byte-identical outputs regardless of thread count.

Exit codes: 0 success, 2 input error, 3 configuration error, 64 usage
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, estimators, hyperball, oracle
from .community import PprConfig, SeedCriterion, pagerank_nibble, select_seeds
from .errors import ConfigurationError, InputError, PreconditionError, UndefinedValueError
from .graph import Graph, PlantedPartitionParams, generate_planted_partition, load_edgelist, save_edgelist
from .hyperball import BallKind
from .scoring import compute_cluster_scores, exact_conductance_profile, register_sweep
from .sketch import HllConfig

USAGE_ERROR = 64
_ORACLE_LIMIT = 5000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self._fh = sys.stdout if path in (None, "-") else open(path, "w")

    def row(self, values) -> None:
        self._fh.write(",".join(_fmt(v) for v in values) + "\n")

    def close(self) -> None:
        if self._fh is not sys.stdout:
            self._fh.close()


def _vlog(args, message: str) -> None:
    if getattr(args, "verbose", False):
        print(f"ballsketch: {message}", file=sys.stderr)


def _load_graph(args) -> Graph:
    if not getattr(args, "graph", None):
        raise InputError("this subcommand needs --graph FILE")
    try:
        g = load_edgelist(args.graph)
    except OSError as exc:
        raise InputError(f"cannot read graph file: {exc}") from None
    _vlog(args, f"loaded {args.graph}: {g.n} nodes, {g.m} edges "
                f"(dropped {g.report.duplicates_dropped} duplicates, "
                f"{g.report.self_loops_dropped} self-loops)")
    return g


def _config(args) -> HllConfig:
    return HllConfig(b=args.bits, hash_seed=args.hash_seed)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("BALLSKETCH_THREADS")
    if not env:
        return 1
    try:
        return int(env)
    except ValueError:
        raise ConfigurationError(f"BALLSKETCH_THREADS must be an integer, got {env!r}") from None


def _guard_oracle(args, g: Graph) -> None:
    if g.n > args.oracle_limit:
        raise InputError(
            f"--oracle refused: graph has {g.n} nodes, exact computation is capped at "
            f"{args.oracle_limit} (raise --oracle-limit to override)"
        )


def _add_common(p, graph=True, sketch=True):
    if graph:
        p.add_argument("--graph", help="edge-list file (whitespace pairs, '#' comments)")
    if sketch:
        p.add_argument("--bits", type=int, default=14, help="register-index bits b (p = 2^b)")
        p.add_argument("--hash-seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--manifest", default=None, help="write the JSON run manifest here instead of stderr")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (results are independent of this; default "
                        "BALLSKETCH_THREADS or 1)")
    p.add_argument("--verbose", action="store_true")


def _add_oracle_flags(p):
    p.add_argument("--oracle", action="store_true", help="append exact columns (small graphs only)")
    p.add_argument("--oracle-limit", type=int, default=_ORACLE_LIMIT)


def _parse_graphlets(path):
    table: dict[int, list[int]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                node = int(parts[0])
                ids = [int(tok) for tok in parts[1:]]
            except ValueError as exc:
                raise InputError(f"graphlet file line {lineno}: {exc}") from None
            table.setdefault(node, []).extend(ids)
    return table


def build_parser() -> _Parser:
    parser = _Parser(prog="ballsketch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ballsketch {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a planted-partition graph as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--mean-degree", type=float, required=True)
    p.add_argument("--seed", type=int, default=0, help="generator rng seed")
    _add_common(p, graph=False, sketch=False)

    p = sub.add_parser("balls", help="per-node ball cardinality estimates")
    _add_common(p)
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in BallKind])
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--seed", dest="hash_seed_alias", type=int, default=None,
                   help="alias for --hash-seed")
    p.add_argument("--graphlets", help="file with one 'node item-id...' line per node")
    p.add_argument("--snapshot-dir", help="write per-round counter snapshots here")

    for name in ("conductance", "transitivity"):
        p = sub.add_parser(name, help=f"per-node {name} estimates with error intervals")
        _add_common(p)
        p.add_argument("--radius", type=int, default=2)
        p.add_argument("--confidence", type=float, default=0.95)
        p.add_argument("--clamp", action="store_true", help="clamp estimates into [0, 1]")
        _add_oracle_flags(p)

    p = sub.add_parser("triangles", help="per-node triangle-count estimates with error intervals")
    _add_common(p)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--confidence", type=float, default=0.95)
    _add_oracle_flags(p)

    p = sub.add_parser("bounds", help="evaluate the error-interval formulas directly")
    _add_common(p, graph=False)
    p.add_argument("--family", required=True, choices=["conductance", "transitivity", "triangle"])
    p.add_argument("--cards", required=True,
                   help="cardinalities: 'edges,outedges' / 'triangles,wedges' / 'triangles'")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--plug-in", action="store_true",
                   help="mark the cardinalities as plug-in estimates")

    p = sub.add_parser("seeds", help="rank nodes as community seeds")
    _add_common(p)
    p.add_argument("--criterion", required=True,
                   choices=["phi_min", "triangle_max", "transitivity_max", "degree_max", "random"])
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--rng-seed", type=int, default=0)

    p = sub.add_parser("nibble", help="local community detection from a seed set")
    _add_common(p)
    p.add_argument("--seeds", help="file with one seed node id per line")
    p.add_argument("--criterion",
                   choices=["phi_min", "triangle_max", "transitivity_max", "degree_max", "random"])
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--max-cut", type=int, default=200)
    p.add_argument("--summary", help="write a per-set quartile summary CSV here")

    p = sub.add_parser("exact", help="exact oracle table for every node and radius")
    _add_common(p, sketch=False)
    p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser("diptest", help="dip unimodality test on a column of numbers")
    _add_common(p, graph=False, sketch=False)
    p.add_argument("--input", required=True, help="file with one value per line ('-' for stdin)")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--rng-seed", type=int, default=0)

    p = sub.add_parser("sweep-registers", help="error scaling across register counts")
    _add_common(p, graph=False, sketch=False)
    p.add_argument("--bits", required=True, help="comma-separated register-index bits, e.g. 8,10,12")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--mu", type=float, default=0.3)
    p.add_argument("--mean-degree", type=float, default=10.0)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--hash-seed", type=int, default=0)
    p.add_argument("--rng-seed", type=int, default=0)

    return parser


def _interval_columns(method_cheb, method_vp):
    lo_c, hi_c = (method_cheb.lo, method_cheb.hi) if method_cheb else (np.nan, np.nan)
    lo_v, hi_v = (method_vp.lo, method_vp.hi) if method_vp else (np.nan, np.nan)
    return lo_c, hi_c, lo_v, hi_v


def _cmd_gen(args, out: _Output) -> None:
    params = PlantedPartitionParams(n=args.n, k=args.k, mean_degree=args.mean_degree,
                                    mu=args.mu, rng_seed=args.seed)
    g = generate_planted_partition(params)
    save_edgelist(g, out._fh)


def _cmd_balls(args, out: _Output) -> None:
    g = _load_graph(args)
    if args.hash_seed_alias is not None:
        args.hash_seed = args.hash_seed_alias
    config = _config(args)
    kind = BallKind(args.kind)
    graphlets = _parse_graphlets(args.graphlets) if args.graphlets else None
    if kind is BallKind.GRAPHLET and graphlets is None:
        raise InputError("--kind graphlet needs --graphlets FILE")
    keep = args.snapshot_dir is not None
    ball_run = hyperball.run(g, kind, args.radius, config, graphlets=graphlets,
                             keep_history=keep)
    if keep:
        os.makedirs(args.snapshot_dir, exist_ok=True)
        for r, registers in enumerate(ball_run.register_history):
            hyperball.save_counters(os.path.join(args.snapshot_dir, f"round_{r}.hllb"),
                                    registers, config)
    out.row(["node", "radius", "estimate"])
    for v in range(g.n):
        for r in range(args.radius + 1):
            out.row([v, r, float(ball_run.estimates[v, r])])


def _ratio_command(args, out: _Output, transitivity: bool) -> None:
    g = _load_graph(args)
    config = _config(args)
    p = config.p
    measures = ("transitivity",) if transitivity else ("conductance",)
    scores = compute_cluster_scores(g, config, args.radius, measures=measures, clamp=args.clamp
                                    if hasattr(args, "clamp") else False)
    if transitivity:
        num, den, est = scores.triangles, scores.wedges, scores.transitivity
        cheb_fn, vp_fn = estimators.chebyshev_transitivity_interval, estimators.vp_transitivity_interval
    else:
        num, den, est = scores.edge, scores.out_edge, scores.conductance
        cheb_fn, vp_fn = estimators.chebyshev_conductance_interval, estimators.vp_conductance_interval
    exact_table = None
    if args.oracle:
        _guard_oracle(args, g)
        exact_table = _exact_score_table(g, args.radius, transitivity)
    header = ["node", "radius", "estimate"]
    if exact_table is not None:
        header.append("exact")
    header += ["cheb_lo", "cheb_hi", "vp_lo", "vp_hi", "confidence", "plug_in_flag"]
    out.row(header)
    for v in range(g.n):
        for r in range(args.radius + 1):
            value = float(est[v, r])
            nc, dc = float(num[v, r]), float(den[v, r])
            cheb = vp = None
            if not np.isnan(value) and nc > 0 and dc > 0:
                p1, p2 = estimators.ratio_widths_for_confidence(args.confidence, nc, dc, p, "chebyshev")
                cheb = cheb_fn(nc, dc, value, p, p1, p2, plug_in=True)
                l1, l2 = estimators.ratio_widths_for_confidence(args.confidence, nc, dc, p, "vp")
                vp = vp_fn(nc, dc, value, p, l1, l2, plug_in=True)
            row = [v, r, value]
            if exact_table is not None:
                row.append(float(exact_table[v, r]))
            row += [*_interval_columns(cheb, vp), args.confidence, True]
            out.row(row)


def _exact_score_table(g: Graph, radius: int, transitivity: bool) -> np.ndarray:
    if not transitivity:
        return exact_conductance_profile(g, radius)
    tri = oracle.enumerate_triangles(g)
    table = np.full((g.n, radius + 1), np.nan)
    for v in range(g.n):
        for r in range(radius + 1):
            t_touch = oracle.exact_triangles_touching_ball(g, v, r, triangles=tri)
            w_centered = oracle.exact_wedges_centered_in_ball(g, v, r)
            if w_centered > 0:
                table[v, r] = 3.0 * t_touch / w_centered
    return table


def _cmd_triangles(args, out: _Output) -> None:
    g = _load_graph(args)
    config = _config(args)
    p = config.p
    tri = oracle.enumerate_triangles(g)
    ball_run = hyperball.run(g, BallKind.TRIANGLE, args.radius, config, triangles=tri)
    exact_table = None
    if args.oracle:
        _guard_oracle(args, g)
        exact_table = np.empty((g.n, args.radius + 1))
        for v in range(g.n):
            for r in range(args.radius + 1):
                exact_table[v, r] = oracle.exact_triangles_touching_ball(g, v, r, triangles=tri)
    header = ["node", "radius", "estimate"]
    if exact_table is not None:
        header.append("exact")
    header += ["cheb_lo", "cheb_hi", "vp_lo", "vp_hi", "confidence", "plug_in_flag"]
    out.row(header)
    for v in range(g.n):
        for r in range(args.radius + 1):
            delta = float(ball_run.estimates[v, r])
            if delta > 0:
                a = estimators.additive_width_for_confidence(args.confidence, delta, p, "chebyshev")
                lam = estimators.additive_width_for_confidence(args.confidence, delta, p, "vp")
                cheb = estimators.chebyshev_triangle_interval(delta, p, a, plug_in=True)
                vp = estimators.vp_triangle_interval(delta, p, lam, plug_in=True)
            else:
                cheb = estimators.chebyshev_triangle_interval(0.0, p, 0.0, plug_in=True)
                vp = estimators.vp_triangle_interval(0.0, p, 0.0, plug_in=True)
            row = [v, r, delta]
            if exact_table is not None:
                row.append(float(exact_table[v, r]))
            row += [*_interval_columns(cheb, vp), args.confidence, True]
            out.row(row)


def _cmd_bounds(args, out: _Output) -> None:
    try:
        cards = [float(tok) for tok in args.cards.split(",") if tok]
    except ValueError as exc:
        raise InputError(f"--cards: {exc}") from None
    p = (1 << args.bits)
    out.row(["family", "estimate", "cheb_lo", "cheb_hi", "vp_lo", "vp_hi", "confidence", "plug_in_flag"])
    if args.family == "triangle":
        if len(cards) != 1:
            raise InputError("--family triangle needs exactly one cardinality")
        delta = cards[0]
        a = estimators.additive_width_for_confidence(args.confidence, delta, p, "chebyshev")
        lam = estimators.additive_width_for_confidence(args.confidence, delta, p, "vp")
        cheb = estimators.chebyshev_triangle_interval(delta, p, a, plug_in=args.plug_in)
        vp = estimators.vp_triangle_interval(delta, p, lam, plug_in=args.plug_in)
        out.row([args.family, delta, *_interval_columns(cheb, vp), args.confidence, args.plug_in])
        return
    if len(cards) != 2:
        raise InputError(f"--family {args.family} needs two cardinalities")
    nc, dc = cards
    if args.family == "conductance":
        value = estimators.estimate_conductance(nc, dc)
        cheb_fn, vp_fn = estimators.chebyshev_conductance_interval, estimators.vp_conductance_interval
    else:
        value = estimators.estimate_transitivity(nc, dc)
        cheb_fn, vp_fn = estimators.chebyshev_transitivity_interval, estimators.vp_transitivity_interval
    p1, p2 = estimators.ratio_widths_for_confidence(args.confidence, nc, dc, p, "chebyshev")
    l1, l2 = estimators.ratio_widths_for_confidence(args.confidence, nc, dc, p, "vp")
    cheb = cheb_fn(nc, dc, value, p, p1, p2, plug_in=args.plug_in)
    vp = vp_fn(nc, dc, value, p, l1, l2, plug_in=args.plug_in)
    out.row([args.family, value, *_interval_columns(cheb, vp), args.confidence, args.plug_in])


def _seed_criterion(args) -> SeedCriterion:
    radius = args.radius if args.criterion in ("phi_min", "triangle_max", "transitivity_max") else None
    return SeedCriterion(kind=args.criterion, radius=radius, rng_seed=args.rng_seed)


def _scores_for_criterion(g, args, criterion: SeedCriterion):
    if criterion.kind == "phi_min":
        measures = ("conductance",)
    elif criterion.kind == "triangle_max":
        measures = ("triangles",)
    elif criterion.kind == "transitivity_max":
        measures = ("transitivity",)
    else:
        return None
    return compute_cluster_scores(g, _config(args), criterion.radius, measures=measures)


def _cmd_seeds(args, out: _Output) -> None:
    g = _load_graph(args)
    criterion = _seed_criterion(args)
    scores = _scores_for_criterion(g, args, criterion)
    chosen = select_seeds(scores, g, criterion, args.k)
    out.row(["rank", "node"])
    for rank, node in enumerate(chosen.tolist()):
        out.row([rank, node])


def _cmd_nibble(args, out: _Output) -> None:
    g = _load_graph(args)
    cfg = PprConfig(alpha=args.alpha, epsilon=args.epsilon, max_cut_size=args.max_cut)
    if args.seeds:
        with open(args.seeds) as fh:
            seeds = [int(line.split()[0]) for line in fh if line.strip() and not line.startswith("#")]
        set_name = "file"
    elif args.criterion:
        criterion = _seed_criterion(args)
        scores = _scores_for_criterion(g, args, criterion)
        seeds = select_seeds(scores, g, criterion, args.k).tolist()
        set_name = args.criterion
    else:
        raise InputError("nibble needs --seeds FILE or --criterion")
    out.row(["seed", "best_size", "best_conductance"])
    results = []
    for s in seeds:
        res = pagerank_nibble(g, int(s), cfg)
        results.append(res)
        out.row([res.seed, res.best_size, res.best_conductance])
    if args.summary:
        conductances = np.asarray([r.best_conductance for r in results])
        vals = conductances[~np.isnan(conductances)]
        with open(args.summary, "w") as fh:
            fh.write("set,count,min,q1,median,q3,max\n")
            if len(vals):
                q = np.percentile(vals, [0, 25, 50, 75, 100])
                fh.write(",".join([set_name, str(len(vals))] + [_fmt(float(x)) for x in q]) + "\n")
            else:
                fh.write(",".join([set_name, "0", "nan", "nan", "nan", "nan", "nan"]) + "\n")


def _cmd_exact(args, out: _Output) -> None:
    g = _load_graph(args)
    tri = oracle.enumerate_triangles(g)
    out.row(["node", "radius", "ball_size", "edgeball", "out_edgeball", "in_edgeball",
             "boundary", "volume", "conductance", "triangles_touching", "wedges_centered",
             "transitivity"])
    for v in range(g.n):
        for r in range(args.radius + 1):
            ball = oracle.exact_ball(g, v, r)
            members = ball.members
            volume = int(g.degrees[list(members)].sum())
            boundary = oracle.exact_boundary(g, members)
            conductance = boundary / volume if volume else float("nan")
            try:
                transitivity = oracle.exact_transitivity(g, members, triangles=tri)
            except UndefinedValueError:
                transitivity = float("nan")
            out.row([
                v, r, len(members),
                oracle.exact_edgeball(g, v, r),
                oracle.exact_out_edgeball(g, v, r),
                oracle.exact_in_edgeball(g, v, r),
                boundary, volume, conductance,
                oracle.exact_triangles_touching_ball(g, v, r, triangles=tri),
                oracle.exact_wedges_centered_in_ball(g, v, r),
                transitivity,
            ])


def _cmd_diptest(args, out: _Output) -> None:
    stream = sys.stdin if args.input == "-" else open(args.input)
    try:
        try:
            values = [float(line.strip()) for line in stream if line.strip()]
        except ValueError as exc:
            raise InputError(f"dip input: {exc}") from None
    finally:
        if stream is not sys.stdin:
            stream.close()
    stat, p_value = estimators.dip_test(values, monte_carlo_trials=args.trials,
                                        rng_seed=args.rng_seed)
    out.row(["n", "dip", "p_value", "trials"])
    out.row([len(values), stat, p_value, args.trials])


def _cmd_sweep_registers(args, out: _Output) -> None:
    try:
        bits_list = [int(tok) for tok in args.bits.split(",") if tok]
    except ValueError as exc:
        raise InputError(f"--bits: {exc}") from None
    if not bits_list:
        raise InputError("--bits needs at least one value")
    params = PlantedPartitionParams(n=args.n, k=args.k, mean_degree=args.mean_degree,
                                    mu=args.mu, rng_seed=args.rng_seed)
    rows = register_sweep(params, bits_list, args.trials, radius=args.radius,
                          confidence=args.confidence, hash_seed=args.hash_seed)
    out.row(["bits", "vp_bound", "cheb_bound", "mean_error", "var_error", "mean_abs_error"])
    for row in rows:
        out.row([row.bits, row.vp_bound, row.cheb_bound, row.mean_error,
                 row.var_error, row.mean_abs_error])


_COMMANDS = {
    "gen": _cmd_gen,
    "balls": _cmd_balls,
    "conductance": lambda a, o: _ratio_command(a, o, transitivity=False),
    "transitivity": lambda a, o: _ratio_command(a, o, transitivity=True),
    "triangles": _cmd_triangles,
    "bounds": _cmd_bounds,
    "seeds": _cmd_seeds,
    "nibble": _cmd_nibble,
    "exact": _cmd_exact,
    "diptest": _cmd_diptest,
    "sweep-registers": _cmd_sweep_registers,
}


def _manifest(args, started: float, threads: int) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "command" and v is not None}
    return {
        "tool": "ballsketch",
        "version": __version__,
        "subcommand": args.command,
        "graph_source": getattr(args, "graph", None),
        "hash_seed": getattr(args, "hash_seed", None),
        "rng_seed": getattr(args, "rng_seed", getattr(args, "seed", None)),
        "threads": threads,
        "flags": {k: v for k, v in flags.items()},
        "duration_seconds": round(time.time() - started, 6),
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    started = time.time()
    out = _Output(args.out)
    try:
        threads = _threads(args)
        _COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"ballsketch: input error: {exc}", file=sys.stderr)
        return 2
    except UndefinedValueError as exc:
        print(f"ballsketch: input error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, PreconditionError) as exc:
        print(f"ballsketch: configuration error: {exc}", file=sys.stderr)
        return 3
    finally:
        out.close()
    manifest = _manifest(args, started, threads)
    if args.manifest:
        with open(args.manifest, "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        print(json.dumps(manifest, sort_keys=True), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
