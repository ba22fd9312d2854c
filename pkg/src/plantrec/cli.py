"""Command-line interface.

Exit codes: 0 success, 2 invalid config or input, 3 I/O failure, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds, io
from .errors import InvariantViolationError
from .experiment import ExperimentConfig, run_grid
from .model import ModelParams, make_partition, sample_graph, expectation_matrix, true_cluster_matrix
from .recovery import identify_clusters, same_partition
from .spectral import top_projector


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plantrec", description="Planted partition recovery and bound verification")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a model instance to files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="graph file to write")
    g.add_argument("--truth", required=True, help="partition file to write")

    r = sub.add_parser("recover", help="recover clusters from a graph file")
    r.add_argument("--graph", required=True)
    r.add_argument("--s", type=int, required=True)
    r.add_argument("--truth", help="optional partition file to compare against")

    v = sub.add_parser("verify", help="run bound checks on an instance")
    v.add_argument("--graph", required=True)
    v.add_argument("--truth", required=True)
    v.add_argument("--p", type=float, required=True)
    v.add_argument("--q", type=float, required=True)
    v.add_argument("--checks", default="norm,proj,conc", help="comma list from norm,proj,conc,fk,goodcol")
    v.add_argument("--epsilon", default="auto", help="deviation parameter or 'auto' to measure it")
    v.add_argument("--seed", type=int, default=0, help="seed recorded in report rows")
    v.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    e = sub.add_parser("experiment", help="run a config-driven grid")
    e.add_argument("--config", required=True)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--out", help="output directory (falls back to the config's 'out')")
    e.add_argument("--emit-plot-data", action="store_true")

    c = sub.add_parser("constants", help="print the guarantee constants for p, q")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--c", type=float, help="override the cluster-size constant")
    return parser


def _cmd_generate(args) -> int:
    part = make_partition(args.n, args.s)
    g = sample_graph(part, ModelParams(p=args.p, q=args.q, seed=args.seed))
    io.write_graph(args.out, g)
    io.write_partition(args.truth, part)
    print(f"wrote {args.out} ({g.edge_count} edges) and {args.truth}")
    return 0


def _cmd_recover(args) -> int:
    g = io.read_graph(args.graph)
    result = identify_clusters(g, args.s)
    payload = result.as_dict(args.s)
    if args.truth:
        truth = io.read_partition(args.truth)
        payload["exact"] = same_partition(result, truth)
    print(json.dumps(payload))
    return 0


def _cmd_verify(args) -> int:
    g = io.read_graph(args.graph)
    part = io.read_partition(args.truth)
    if part.n != g.n:
        raise ValueError("graph and partition sizes differ")
    checks = tuple(c for c in args.checks.split(",") if c)
    unknown = set(checks) - {"norm", "proj", "conc", "fk", "goodcol"}
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    params = ModelParams(p=args.p, q=args.q, seed=args.seed)
    expected = expectation_matrix(part, params)
    sampled = g.dense()
    ctx = {"n": part.n, "k": part.k, "s": part.s, "p": args.p, "q": args.q,
           "seed": args.seed, "mask": (1 << part.k) - 1}
    if args.epsilon == "auto":
        eps = max(bounds.empirical_epsilon(sampled, expected, part.k), 1e-12)
    else:
        eps = float(args.epsilon)
    reports = []
    if "norm" in checks:
        reports.append(bounds.check_norm_deviation(sampled, expected, **ctx))
    if "proj" in checks:
        reports.extend(bounds.check_projector_deviation(sampled, expected, part.k, **ctx))
    if "conc" in checks:
        conc_ctx = {key: v for key, v in ctx.items() if key not in ("p", "q")}
        reports.extend(bounds.check_concentration(g, part, args.p, args.q, eps, **conc_ctx))
    if "fk" in checks:
        unions = bounds.cluster_unions(part, seed=args.seed)
        sigma = bounds.Constants.from_params(args.p, args.q, c=1.0).sigma
        noise = bounds.centered_adjacency(g, part, params)
        fk_ctx = {key: ctx[key] for key in ("n", "k", "s", "p", "q", "seed")}
        reports.extend(
            bounds.check_fk_submatrices(
                noise, [v for _, v in unions], sigma, labels=[m for m, _ in unions], **fk_ctx
            )
        )
    if "goodcol" in checks:
        gc_ctx = {key: v for key, v in ctx.items() if key != "s"}
        reports.append(
            bounds.check_good_column(
                top_projector(sampled, part.k), true_cluster_matrix(part), part.s,
                min(eps, 0.1), epsilon_measured=eps, **gc_ctx,
            )
        )
    if args.out == "-":
        io.write_reports_csv(sys.stdout, reports)
    else:
        io.write_reports_csv(args.out, reports)
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as f:
        raw = json.load(f)
    config = ExperimentConfig.from_dict(raw)
    out_dir = args.out or config.out
    if out_dir is None:
        raise ValueError("no output directory: pass --out or set 'out' in the config")
    summaries = run_grid(config, out_dir, jobs=args.jobs, emit_plot_data=args.emit_plot_data)
    for s in summaries:
        extra = ""
        if s.baseline_success_rate is not None:
            extra = f" baseline={s.baseline_success_rate:.3f}"
        print(
            f"cell {s.cell.index}: n={s.cell.n} k={s.cell.k} p={s.cell.p} q={s.cell.q}"
            f" success={s.success_rate:.3f}{extra}"
        )
    return 0


def _cmd_constants(args) -> int:
    c_min = bounds.admissible_c(args.p, args.q)
    c = args.c if args.c is not None else c_min
    consts = bounds.Constants.from_params(args.p, args.q, c)
    print(f"admissible_c = {repr(c_min)}")
    print(f"c = {repr(float(c))}")
    print(f"c_prime = {repr(consts.c_prime)}")
    eps = consts.epsilon
    print(f"epsilon = {repr(eps) if eps is not None else 'undefined (c_prime <= 16)'}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "recover": _cmd_recover,
    "verify": _cmd_verify,
    "experiment": _cmd_experiment,
    "constants": _cmd_constants,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvariantViolationError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 4
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
