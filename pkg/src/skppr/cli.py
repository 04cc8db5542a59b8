"""Command-line interface.

Subcommands cover the exact oracle, plain Monte Carlo, both push
primitives, both query engines, the guarantee verifier, and the scaling
harness.  Exit codes: 0 success, 2 argument error, 3 input validation
error.  Outputs are deterministic for a fixed (graph, flags, seed) and
``PPR_THREADS=1``.
"""
from __future__ import annotations

import argparse
import contextlib
import sys

from .exact import exact_ssppr
from .graphs import (
    EdgeListFormatError,
    GraphValidationError,
    generate_power_law,
    read_graph,
    write_graph,
    write_id_map,
)
from .harness import powerlaw_family, scale_experiment, verify_guarantee
from .push import backward_push, forward_push, write_push_result
from .queries import QueryParams, ssppr_a, ssppr_d, write_answer
from .walks import ROLE_FIRST_PASS, WalkEngine, monte_carlo

PROG = "skppr"


@contextlib.contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as f:
            yield f


def _load(args) -> "Graph":
    mode = None if args.mode == "auto" else args.mode
    return read_graph(args.graph, mode)


def _add_graph_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument(
        "--mode",
        choices=["auto", "directed", "undirected"],
        default="auto",
        help="edge-list interpretation; auto reads the mode= header (default: auto)",
    )


def _add_out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")


def cmd_gen(args) -> int:
    g = generate_power_law(args.n, args.attach, args.seed)
    with _open_out(args.out) as f:
        write_graph(g, f)
    if args.idmap_out:
        with open(args.idmap_out, "w", encoding="utf-8") as f:
            write_id_map(g, f)
    return 0


def cmd_exact(args) -> int:
    g = _load(args)
    scores = exact_ssppr(g, args.source, args.alpha, args.tol).scores
    with _open_out(args.out) as f:
        for v in range(g.n):
            f.write(f"{v}\t{float(scores[v])!r}\n")
    return 0


def cmd_mc(args) -> int:
    g = _load(args)
    engine = WalkEngine.from_seed(args.alpha, args.seed, ROLE_FIRST_PASS)
    est = monte_carlo(g, args.source, args.walks, engine)
    with _open_out(args.out) as f:
        for v in sorted(est.values):
            f.write(f"{v}\t{est.values[v]!r}\n")
    return 0


def cmd_bp(args) -> int:
    g = _load(args)
    result = backward_push(g, args.alpha, args.target, args.rmax)
    with _open_out(args.out) as f:
        write_push_result(result, f)
    return 0


def cmd_fp(args) -> int:
    g = _load(args)
    result = forward_push(g, args.alpha, args.source, args.rmax)
    with _open_out(args.out) as f:
        write_push_result(result, f)
    return 0


def _run_query(args, which: str) -> int:
    g = _load(args)
    kwargs = dict(
        alpha=args.alpha,
        seed=args.seed,
        c_walk=args.c_walk,
        fallback_enabled=args.fallback,
        fallback_factor=args.fallback_factor,
    )
    if which == "a":
        params = QueryParams(eps=args.eps, **kwargs)
        answer = ssppr_a(g, args.source, params)
    else:
        params = QueryParams(eps_d=args.eps_d, **kwargs)
        answer = ssppr_d(g, args.source, params)
    with _open_out(args.out) as f:
        write_answer(answer, f)
    if args.diag:
        with open(args.diag, "w", encoding="utf-8") as f:
            f.write(answer.diagnostics.to_json() + "\n")
    return 0


def cmd_ssppr_a(args) -> int:
    return _run_query(args, "a")


def cmd_ssppr_d(args) -> int:
    return _run_query(args, "d")


def cmd_verify(args) -> int:
    g = _load(args)
    report = verify_guarantee(
        g,
        args.algorithm,
        args.source,
        args.eps,
        args.runs,
        args.seed,
        alpha=args.alpha,
        oracle_cap=args.oracle_cap,
    )
    with _open_out(args.out) as f:
        f.write(report.to_json() + "\n")
    return 0


def cmd_scale(args) -> int:
    if args.graph:
        graphs = []
        for path in args.graph:
            graphs.append((path, read_graph(path, None if args.mode == "auto" else args.mode)))
    elif args.sizes:
        sizes = [int(x) for x in args.sizes.split(",") if x]
        graphs = powerlaw_family(sizes, args.attach, args.gen_seed)
    else:
        raise ValueError("scale needs --graph files or a generated family via --sizes")
    eps_grid = [float(x) for x in args.eps_grid.split(",") if x]
    report = scale_experiment(
        args.algorithm,
        graphs,
        eps_grid,
        args.seeds,
        source_spec=args.source,
        alpha=args.alpha,
        seed=args.seed,
    )
    with _open_out(args.out) as f:
        f.write(report.to_json() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Approximate single-source personalized PageRank with error guarantees.",
        epilog="PPR_THREADS bounds the harness worker pool (default 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a preferential-attachment graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--attach", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--idmap-out", default=None, help="also write external<TAB>dense id map")
    _add_out_arg(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("exact", help="exact scores by power iteration")
    _add_graph_arg(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_out_arg(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("mc", help="Monte Carlo terminal frequencies")
    _add_graph_arg(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_out_arg(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("bp", help="backward push toward a target")
    _add_graph_arg(p)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--rmax", type=float, required=True)
    _add_out_arg(p)
    p.set_defaults(func=cmd_bp)

    p = sub.add_parser("fp", help="forward push from a source")
    _add_graph_arg(p)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--rmax", type=float, required=True)
    _add_out_arg(p)
    p.set_defaults(func=cmd_fp)

    def add_query_common(p, err_flag, err_name):
        _add_graph_arg(p)
        p.add_argument("--source", type=int, required=True)
        p.add_argument(err_flag, dest=err_name, type=float, required=True)
        p.add_argument("--alpha", type=float, default=0.2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--c-walk", type=float, default=1.0)
        p.add_argument("--fallback", action="store_true", help="enable the exact-oracle cost fallback")
        p.add_argument("--fallback-factor", type=float, default=4.0)
        p.add_argument("--diag", default=None, help="write JSON diagnostics to this path")
        _add_out_arg(p)

    p = sub.add_parser("ssppr-a", help="absolute-error single-source query")
    add_query_common(p, "--eps", "eps")
    p.set_defaults(func=cmd_ssppr_a)

    p = sub.add_parser("ssppr-d", help="degree-normalized single-source query (undirected)")
    add_query_common(p, "--eps-d", "eps_d")
    p.set_defaults(func=cmd_ssppr_d)

    p = sub.add_parser("verify", help="replay seeded queries against the oracle")
    _add_graph_arg(p)
    p.add_argument("--algorithm", choices=["a", "d"], required=True)
    p.add_argument("--source", default="uniform", help="node id, 'uniform', or 'degree'")
    p.add_argument("--eps", type=float, required=True, help="error budget (eps_d for algorithm d)")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--oracle-cap", type=int, default=2000)
    _add_out_arg(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scale", help="accounted-cost scaling grid")
    p.add_argument("--algorithm", choices=["a", "d"], required=True)
    p.add_argument("--graph", action="append", default=None, help="edge-list file (repeatable)")
    p.add_argument(
        "--mode",
        choices=["auto", "directed", "undirected"],
        default="auto",
        help="edge-list interpretation for --graph files",
    )
    p.add_argument("--sizes", default=None, help="comma list of n for generated graphs")
    p.add_argument("--attach", type=int, default=4)
    p.add_argument("--gen-seed", type=int, default=1)
    p.add_argument("--eps-grid", required=True, help="comma list of error budgets")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--source", default="uniform", help="node id, 'uniform', or 'degree'")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    _add_out_arg(p)
    p.set_defaults(func=cmd_scale)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        return args.func(args)
    except (EdgeListFormatError, GraphValidationError) as e:
        print(f"{PROG}: invalid input: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"{PROG}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
