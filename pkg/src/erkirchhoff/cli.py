"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or arguments, 2 runtime or I/O failure.
Every subcommand echoes its resolved configuration (seeds included) as a
JSON line on stderr before doing any work.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from ._validation import ContractError, check_node_count, check_probability, check_seed
from .er import ErParams, centered_laplacian, en_threshold, sample_er
from .experiment import (
    DESK_GRID,
    FULL_GRID,
    ExperimentConfig,
    default_scenarios,
    load_config,
    output_paths,
    parse_scenario,
    run_experiment,
    write_manifest,
    derive_seed,
)
from .graph import EdgeListError, build_laplacian, connected_components, is_connected, read_edgelist, wiener_index
from .spectral import operator_norm, pseudo_inverse, resistance_matrix, trace_pinv
from .sync import crb_experiment
from .theory import (
    assumption_diagnostic,
    band_probability,
    expected_kirchhoff,
    expected_xn,
    expected_xn_vanishing,
    fluctuation_bound,
    max_trace_pinv_bound,
    power_law_p,
)

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
MAX_RESAMPLES = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _echo_config(name, cfg):
    print(json.dumps({"command": name, **cfg}, sort_keys=True), file=sys.stderr)


def _num(x, digits=12):
    """Human-readable number: ``inf`` literal, otherwise ``digits`` significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if math.isinf(x):
        return "inf"
    return f"{x:.{digits}g}"


def _json_num(x):
    # JSON has no infinity; disconnection is reported as null.
    return None if isinstance(x, float) and math.isinf(x) else x


def _print_table(rows, digits=6):
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            v = str(v)
        print(f"{k:<{width}}  {v if isinstance(v, str) else _num(v, digits)}")


def _load_graph(args):
    """Return ``(graph, p, source_description)`` from ``--er`` or ``--input``."""
    if (args.er is None) == (args.input is None):
        raise UsageError("exactly one of --er N P [SEED] or --input PATH is required")
    if args.er is not None:
        if len(args.er) not in (2, 3):
            raise UsageError("--er takes N P [SEED]")
        try:
            n, p = int(args.er[0]), float(args.er[1])
            seed = int(args.er[2]) if len(args.er) == 3 else 0
        except ValueError:
            raise UsageError(f"--er: cannot parse {' '.join(args.er)!r}") from None
        params = ErParams(n, p, seed)
        return sample_er(params), p, {"er": {"n": n, "p": p, "seed": seed}}
    return read_edgelist(args.input), None, {"input": args.input}


def cmd_graph(args):
    g, p, source = _load_graph(args)
    _echo_config("graph", source)
    connected = is_connected(g)
    out = {"n": g.n, "edges": g.n_edges, "connected": connected}
    if p is not None:
        norm = operator_norm(centered_laplacian(g, p))
        out["l1_norm"] = norm
        out["en_threshold"] = en_threshold(g.n, p)
        out["event_en"] = norm <= out["en_threshold"]
    out["wiener"] = wiener_index(g)
    if args.json:
        print(json.dumps({k: _json_num(v) for k, v in out.items()}))
    else:
        _print_table(list(out.items()), 12)
    return EXIT_OK


def cmd_kirchhoff(args):
    g, p, source = _load_graph(args)
    _echo_config("kirchhoff", {**source, "pairs": args.pairs})
    lap = build_laplacian(g)
    tr = trace_pinv(lap)
    connected = is_connected(g)
    kf = g.n * tr if connected else math.inf
    out = {"n": g.n, "connected": connected, "trace_pinv": tr, "kirchhoff": kf}
    if p is not None:
        out["xn"] = p * tr
    if args.pairs:
        r = resistance_matrix(pseudo_inverse(lap))
        labels = np.empty(g.n, dtype=int)
        for k, comp in enumerate(connected_components(g)):
            labels[comp] = k
        print("i,j,resistance")
        for i in range(g.n):
            for j in range(i + 1, g.n):
                val = r[i, j] if labels[i] == labels[j] else math.inf
                print(f"{i},{j},{_num(val)}")
        return EXIT_OK
    if args.json:
        print(json.dumps({k: _json_num(v) for k, v in out.items()}))
    else:
        _print_table(list(out.items()), 12)
    return EXIT_OK


def cmd_theory(args):
    try:
        n = check_node_count(args.n, "n")
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    if args.alpha is not None and not 0 < args.alpha <= 1:
        raise UsageError(f"--alpha must lie in (0, 1], got {args.alpha}")
    if args.gamma is not None and not args.gamma > 0:
        raise UsageError(f"--gamma must be positive, got {args.gamma}")
    vanishing = args.gamma is not None or args.alpha is not None
    if vanishing and (args.gamma is None or args.alpha is None):
        raise UsageError("--gamma and --alpha must be given together")
    if vanishing:
        if args.alpha == 1 and args.gamma >= 1:
            raise UsageError("--gamma must be < 1 when --alpha is 1")
    p = args.p
    if p is None:
        if not vanishing:
            raise UsageError("give p, or --gamma and --alpha")
        p = power_law_p(n, args.gamma, args.alpha)
    try:
        p = check_probability(p, "p")
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    if not 0 < args.epsilon <= 0.5:
        raise UsageError(f"--epsilon must lie in (0, 1/2], got {args.epsilon}")
    cfg = {"n": n, "p": p, "epsilon": args.epsilon}
    if vanishing:
        cfg.update(gamma=args.gamma, alpha=args.alpha)
    _echo_config("theory", cfg)

    diag = assumption_diagnostic(n, p)
    rows = [
        ("n", n),
        ("p", p),
        ("expected_xn", expected_xn(n, p)),
    ]
    if vanishing:
        rows.append(("expected_xn_vanishing", expected_xn_vanishing(n, args.gamma, args.alpha)))
    rows += [
        ("fluctuation_bound", fluctuation_bound(n, p, args.epsilon)),
        ("epsilon", args.epsilon),
        ("band_probability", band_probability(n, args.epsilon)),
        ("c_n", diag.cn),
        ("assumption_ratio", diag.ratio),
        ("en_prob_floor", diag.en_prob_floor),
        ("expected_kirchhoff", expected_kirchhoff(n, p)),
        ("max_trace_pinv", max_trace_pinv_bound(n)),
    ]
    if args.json:
        print(json.dumps(dict(rows)))
    else:
        _print_table(rows)
    return EXIT_OK


def _experiment_config(args):
    kwargs = {
        "scenarios": default_scenarios(),
        "n_grid": FULL_GRID if args.full else DESK_GRID,
        "replicates": 500 if args.full else 100,
        "epsilon": 0.004,
        "master_seed": 0,
        "output_path": "sweep",
    }
    if args.config is not None:
        try:
            kwargs.update(load_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
    # Flags win over the config file.
    if args.scenario:
        kwargs["scenarios"] = tuple(parse_scenario(s) for s in args.scenario)
    if args.full:
        kwargs["n_grid"] = FULL_GRID
    if args.n_grid is not None:
        kwargs["n_grid"] = tuple(args.n_grid)
    for flag, key in (("replicates", "replicates"), ("epsilon", "epsilon"), ("seed", "master_seed"),
                      ("output", "output_path")):
        value = getattr(args, flag)
        if value is not None:
            kwargs[key] = value
    return ExperimentConfig(**kwargs).validate()


def cmd_experiment(args):
    config = _experiment_config(args)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    _echo_config("experiment", {**config.to_dict(), "threads": args.threads, "full": args.full,
                                "timing": args.timing})

    def progress(done, total):
        if not args.quiet and (done == total or done % max(1, total // 20) == 0):
            print(f"  {done}/{total} realizations", file=sys.stderr)

    try:
        _, summary = run_experiment(config, threads=args.threads, timing=args.timing, progress=progress)
        manifest = write_manifest(config, config.output_path, threads=args.threads, full=args.full)
    except KeyboardInterrupt:
        partial = output_paths(config.output_path)[0] + ".partial"
        print(f"interrupted; completed records kept in {partial}", file=sys.stderr)
        return EXIT_RUNTIME
    rec_path, sum_path = output_paths(config.output_path)
    for s in summary:
        print(f"scenario {s.scenario_id} n={s.n:<5d} p={s.p:.6g} mean={s.mean_xn:.6g} "
              f"pred={s.predicted_mean:.6g} band={s.band_halfwidth:.6g} coverage={s.coverage:.6g} "
              f"connected={s.connected_frac:.6g} en={s.en_frac:.6g}")
    print(rec_path)
    print(sum_path)
    print(manifest)
    return EXIT_OK


def cmd_sync(args):
    try:
        d = int(args.d)
        if d < 1:
            raise ContractError(f"--d must be >= 1, got {d}")
        if not args.sigma2 >= 0:
            raise ContractError(f"--sigma2 must be >= 0, got {args.sigma2}")
        if args.trials < 1:
            raise ContractError(f"--trials must be >= 1, got {args.trials}")
        seed = check_seed(args.seed)
        if args.input is None:
            n = check_node_count(args.n, "--n")
            p = check_probability(args.p, "--p")
    except ContractError as exc:
        raise UsageError(str(exc)) from None

    resamples = 0
    if args.input is not None:
        g = read_edgelist(args.input)
        source = args.input
        _echo_config("sync", {"input": args.input, "d": d, "sigma2": args.sigma2, "trials": args.trials,
                              "seed": seed})
        if not is_connected(g):
            raise UsageError(f"{args.input}: measurement graph is disconnected")
    else:
        _echo_config("sync", {"n": n, "p": p, "d": d, "sigma2": args.sigma2, "trials": args.trials,
                              "seed": seed})
        if n * p < math.log(n):
            print(f"warning: n*p = {n * p:.3g} < ln n; connected draws may be rare", file=sys.stderr)
        source = p
        for attempt in range(MAX_RESAMPLES):
            g = sample_er(ErParams(n, p, derive_seed(seed, 0, n, attempt)))
            if is_connected(g):
                break
            resamples += 1
        else:
            print(f"error: {MAX_RESAMPLES} consecutive disconnected draws at n={n}, p={p}", file=sys.stderr)
            return EXIT_RUNTIME
    report = crb_experiment(g, d, args.sigma2, args.trials, seed=seed, threads=args.threads)
    print(json.dumps({
        "n": g.n,
        "d": d,
        "p_or_graphfile": source,
        "sigma2": args.sigma2,
        "trials": args.trials,
        "empirical_mse": report.empirical_mse,
        "crb": report.crb,
        "ratio": report.ratio,
        "seed": seed,
        "resamples": resamples,
    }))
    return EXIT_OK


def _add_source(p):
    p.add_argument("--er", nargs="+", metavar="N P [SEED]", help="sample G(N, P) with SEED (default 0)")
    p.add_argument("--input", metavar="PATH", help="edge-list file ('n=<count>' header, then 'i j' lines)")


def build_parser():
    parser = _Parser(prog="erkirchhoff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("graph", help="edge count, connectivity, ||L1|| and Wiener index")
    _add_source(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("kirchhoff", help="trace(L^+), Kirchhoff index, X_n, resistance distances")
    _add_source(p)
    p.add_argument("--pairs", action="store_true", help="print all pairwise resistance distances as CSV")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kirchhoff)

    p = sub.add_parser("theory", help="closed-form predictions for G(n, p)")
    p.add_argument("n", type=int)
    p.add_argument("p", type=float, nargs="?")
    p.add_argument("--epsilon", type=float, default=0.004)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("experiment", help="Monte Carlo sweep of X_n against the predicted band")
    p.add_argument("--config", metavar="PATH", help="TOML config; flags override its values")
    p.add_argument("--scenario", action="append", metavar="SPEC",
                   help="power_law:GAMMA:ALPHA or constant:P (repeatable)")
    p.add_argument("--n-grid", type=int, nargs="+", metavar="N")
    p.add_argument("--replicates", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--output", metavar="PREFIX", help="output prefix (default 'sweep')")
    p.add_argument("--full", action="store_true", help="15-point grid 100..2000 with 500 replicates")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record eigensolver wall time (breaks byte-reproducibility)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sync", help="Cramer-Rao check for synchronization of translations")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--input", metavar="PATH", help="use a fixed edge-list graph instead of an ER draw")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sync)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (UsageError, EdgeListError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
