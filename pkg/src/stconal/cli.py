"""Command-line interface.

Exit codes: 0 on success, 1 for usage or configuration errors, 2 when a
run fails at runtime. Set ``STCONAL_WORKERS`` to run (criterion, seed)
pairs in parallel processes.
"""

import argparse
import json
import logging
import sys

from .datasets import (ImbalanceProfile, apply_imbalance, gen_gaussian_blobs,
                       save_csv)
from .exceptions import ConfigError, GenerationError, InvalidInputError
from .experiment import (ExperimentConfig, analyze_run_dir, run_experiment,
                         run_sweep)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="stconal",
                description="Consistency-based active learning experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run every (criterion, seed) pair")
    run.add_argument("config")

    sw = sub.add_parser("sweep", help="repeat the experiment over one axis")
    sw.add_argument("config")
    sw.add_argument("--axis", required=True, choices=["b", "q", "t", "teacher"])

    an = sub.add_parser("analyze", help="analyses over saved checkpoints")
    an.add_argument("kind", choices=["rank-overlap", "pred-hist"])
    an.add_argument("run_dir")
    an.add_argument("--fraction", type=float, default=0.05)
    an.add_argument("--bins", type=int, default=10)

    gen = sub.add_parser("gen-data", help="write a synthetic dataset as CSV")
    gen.add_argument("--classes", type=int, default=4)
    gen.add_argument("--per-class", type=int, default=25)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--spread", type=float, default=1.0)
    gen.add_argument("--separation", type=float, default=3.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--imbalance", choices=["none", "step", "longtail"],
                     default="none")
    gen.add_argument("--ratio", type=float, default=10.0)
    gen.add_argument("--n-max", type=int, default=None,
                     help="largest class size (default: --per-class)")
    gen.add_argument("out")
    return p


def cmd_run(args):
    cfg = ExperimentConfig.load(args.config)
    records, summary, failures = run_experiment(cfg)
    for r in summary.rows:
        gap = "" if r.gap is None else f"  gap {r.gap:+.4f}"
        print(f"{r.criterion:>16}  n={r.labeled_count:<6d} "
              f"acc {r.mean:.4f} ± {r.std:.4f}{gap}")
    if failures:
        for name in failures:
            print(f"FAILED: {name}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_sweep(args):
    cfg = ExperimentConfig.load(args.config)
    results, failures = run_sweep(cfg, args.axis)
    for value, summary in results:
        for crit in summary.criteria:
            last = [r for r in summary.rows if r.criterion == crit][-1]
            print(f"{args.axis}={value}  {crit:>16}  final acc {last.mean:.4f}")
    return EXIT_RUNTIME if failures else EXIT_OK


def cmd_analyze(args):
    report = analyze_run_dir(args.run_dir, args.kind, fraction=args.fraction,
                             bins=args.bins)
    print(json.dumps(report, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_gen_data(args):
    try:
        ds = gen_gaussian_blobs(args.classes, args.per_class, args.dim,
                                spread=args.spread,
                                class_separation=args.separation,
                                seed=args.seed)
        if args.imbalance != "none":
            n_max = args.per_class if args.n_max is None else args.n_max
            profile = ImbalanceProfile(args.imbalance, args.ratio, n_max)
            ds = apply_imbalance(ds, profile, args.seed)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        save_csv(ds, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "analyze": cmd_analyze,
            "gen-data": cmd_gen_data}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failures surface as exit 2
        logging.getLogger(__name__).debug("unhandled", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
