"""Command line front-end.

Verbs: verify-tables, boltzmann, run, baselines, summarize. All flags can
also be supplied through a JSON config file (``--config``); explicit flags
win over file values. Exit code is 0 iff every invoked check passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .boltzmann import (
    DEFAULT_MAX_N,
    adjacent_vs_nonadjacent_mi,
    enumerate_boltzmann,
    marginals,
    pairwise_fitness_scatter,
    write_mutual_info_csv,
    write_scatter_csv,
    write_univariate_csv,
)
from .braid import fibonacci_generators
from .fitness import FitnessSpec, Variant
from .harness import (
    GRID_N_VALUES,
    ResultStore,
    VariantId,
    full_grid,
    run_baselines,
    run_variant,
    summarize,
    verify_tables,
)

_FUNCTION_NAMES = {
    "f": Variant.PLAIN_F,
    "fhat": Variant.EFFECTIVE_F_HAT,
    "fbar": Variant.PREFIX_BEST_F_BAR,
}


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if getattr(args, "config", None) is None:
        return
    # defaults live on the subcommand's parser, not the top-level one
    sub = getattr(args, "subparser", parser)
    doc = json.loads(Path(args.config).read_text())
    for key, value in doc.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            sub.error(f"unknown config key {key!r}")
        # command line wins: only fill values the user left at default
        if sub.get_default(key) == getattr(args, key):
            setattr(args, key, value)


def cmd_verify_tables(args) -> int:
    gs = fibonacci_generators()
    reports = verify_tables(gs)
    for report in reports:
        print(report.line())
    return 0 if all(r.ok for r in reports) else 1


def cmd_boltzmann(args) -> int:
    gs = fibonacci_generators()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = FitnessSpec(_FUNCTION_NAMES[args.function], args.lam)
    table = enumerate_boltzmann(gs, spec, args.n, args.temperature, args.max_n)
    ms = marginals(table)
    write_univariate_csv(out_dir / "univariate.csv", ms)
    write_mutual_info_csv(out_dir / "mutual_info.csv", ms)
    spec_b = FitnessSpec(_FUNCTION_NAMES[args.scatter_against], args.lam)
    pairs = pairwise_fitness_scatter(gs, spec, spec_b, args.n, args.temperature, args.max_n)
    write_scatter_csv(out_dir / "scatter.csv", pairs)
    adj, non = adjacent_vs_nonadjacent_mi(ms)
    avg = ms.univariate.mean(axis=0)
    print(f"enumerated 4^{args.n} = {4 ** args.n} words at T={args.temperature}")
    print(f"position-averaged marginals: " + " ".join(f"{p:.5f}" for p in avg))
    print(f"mean adjacent MI {adj:.3e} bits, mean non-adjacent MI {non:.3e} bits")
    print(f"wrote univariate.csv, mutual_info.csv, scatter.csv to {out_dir}")
    return 0


def cmd_run(args) -> int:
    gs = fibonacci_generators()
    store = ResultStore(args.out)
    variants = full_grid() if args.all_variants else [VariantId.decode(args.variant)]
    preset = "paper" if args.paper_budgets else "desk"
    overrides = {}
    if args.population is not None:
        overrides["population"] = args.population
    if args.generations is not None:
        overrides["generations"] = args.generations
    if args.max_evaluations is not None:
        overrides["max_evaluations"] = args.max_evaluations
    for variant in variants:
        for n in args.n:
            records = run_variant(
                gs, variant, n, runs=args.runs, root_seed=args.seed,
                preset=preset, store=store, **overrides,
            )
            best = max(r.best_evaluation.fitness for r in records)
            print(f"variant {variant.label()} n={n}: {len(records)} runs, best fitness {best:.6f}")
    print(f"results appended to {store.jsonl_path}")
    return 0


def cmd_baselines(args) -> int:
    gs = fibonacci_generators()
    store = ResultStore(args.out)
    for n in args.n:
        out = run_baselines(
            gs, n, repetitions=args.runs, root_seed=args.seed,
            random_draws=args.random_draws, greedy_starts=args.greedy_starts,
            store=store,
        )
        for kind, values in out.items():
            values = sorted(values)
            print(f"{kind} n={n}: {len(values)} reps, median best fitness "
                  f"{values[len(values) // 2]:.6f}")
    print(f"results appended to {store.jsonl_path}")
    return 0


def cmd_summarize(args) -> int:
    rows = summarize(args.results, args.out)
    for row in rows:
        print(f"{row['kind']:8s} {row['variant']:12s} n={row['n']}: "
              f"median {row['median']:.6f} over {row['runs']} runs")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="braideda")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-tables", help="re-evaluate the published best braids")
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("boltzmann", help="exhaustive landscape analysis at small n")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--function", choices=sorted(_FUNCTION_NAMES), default="f")
    p.add_argument("--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--scatter-against", choices=sorted(_FUNCTION_NAMES), default="fbar")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    p.add_argument("--out", default="boltzmann_out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_boltzmann, subparser=p)

    p = sub.add_parser("run", help="run EDA variants")
    p.add_argument("--variant", nargs=5, type=int, metavar=("L", "TF", "TLAMBDA", "TS", "PM"),
                   default=[1, 3, 1, 2, 1])
    p.add_argument("--all-variants", action="store_true", help="run the full 288-variant grid")
    p.add_argument("--n", nargs="+", type=int, default=list(GRID_N_VALUES))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--max-evaluations", type=int)
    budgets = p.add_mutually_exclusive_group()
    budgets.add_argument("--paper-budgets", action="store_true")
    budgets.add_argument("--desk", action="store_true", help="desk-scale budgets (default)")
    p.add_argument("--workers", type=int, default=1,
                   help="reserved; runs execute sequentially and deterministically")
    p.add_argument("--out", default="results")
    p.add_argument("--config")
    p.set_defaults(func=cmd_run, subparser=p)

    p = sub.add_parser("baselines", help="random-search and greedy baselines")
    p.add_argument("--n", nargs="+", type=int, default=[50])
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-draws", type=int, default=10000)
    p.add_argument("--greedy-starts", type=int, default=200)
    p.add_argument("--out", default="results")
    p.add_argument("--config")
    p.set_defaults(func=cmd_baselines, subparser=p)

    p = sub.add_parser("summarize", help="aggregate a results.jsonl into a CSV")
    p.add_argument("--results", default="results/results.jsonl")
    p.add_argument("--out", default="results/aggregate.csv")
    p.set_defaults(func=cmd_summarize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
