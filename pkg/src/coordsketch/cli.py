"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 estimator not applicable.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Optional, Sequence

from . import io as fmt
from .combine import combine
from .core import build_coordinated
from .datasets import gen_dataset, oracle_weight
from .estimate_ml import ml_subpop_scs, ml_union_scs
from .estimate_rc import InapplicableEstimator, estimate_weight, resolve_kind
from .experiment import ExperimentConfig, preset, read_results, run_experiment, summarize, write_results, write_summary
from .poisson import build_poisson_coordinated
from .predicate import as_predicate, is_pure_union

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INAPPLICABLE = 3


def _out(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    collection = gen_dataset(args.spec, args.weights, args.seed)
    _out(args, fmt.write_collection(collection))
    return EXIT_OK


def cmd_sketch(args) -> int:
    collection = fmt.read_collection(args.dataset)
    if args.sets:
        collection = collection.subcollection(args.sets)
    if args.poisson:
        samples = build_poisson_coordinated(collection, args.family, args.seed, k=args.k)
        _out(args, fmt.write_poisson(samples))
    else:
        sketches = build_coordinated(collection, args.family, args.seed, args.k)
        _out(args, fmt.write_sketches(sketches))
    return EXIT_OK


def _load_sketches(paths: Sequence[str]):
    merged = {}
    for p in paths:
        for s, sk in fmt.read_sketches(p).items():
            if s in merged:
                raise ValueError(f"set {s!r} appears in more than one sketch file")
            merged[s] = sk
    return merged


def cmd_estimate(args) -> int:
    sketches = _load_sketches(args.sketches)
    pred = as_predicate(args.predicate)
    if args.method == "ml":
        sets, _ = resolve_kind(pred, "SCS")
        comb = combine([sketches[s] for s in sets], "SCS")
        value = ml_union_scs(comb) if is_pure_union(pred) else ml_subpop_scs(comb, pred)
        print(f"estimate {value!r} method=ml combination=SCS size={len(comb)}")
        return EXIT_OK
    est = estimate_weight(sketches, pred, args.combination)
    if args.dump_combination:
        sets, kind = resolve_kind(pred, args.combination)
        fmt.write_combination(combine([sketches[s] for s in sets], kind), args.dump_combination)
    print(f"estimate {est.value!r} method=rc combination={est.kind.value} size={est.size}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    collection = fmt.read_collection(args.dataset)
    print(f"oracle {oracle_weight(collection, args.predicate)!r}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.preset:
        config = preset(args.preset)
    elif args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        raise ValueError("give a config file or --preset")
    if args.repetitions:
        config = dataclasses.replace(config, repetitions=args.repetitions)

    def progress(msg):
        logging.getLogger("coordsketch").info(msg)

    rows = run_experiment(config, progress=progress)
    out = args.output or config.output
    text = write_results(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_summarize(args) -> int:
    rows = read_results(args.results)
    _out(args, write_summary(summarize(rows, baseline=args.baseline, tolerance=args.tolerance)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coordsketch", description="Coordinated bottom-k sketches and multiple-set estimators.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic collection file")
    g.add_argument("spec", help='dataset spec, e.g. "pair(10000, 2000)"')
    g.add_argument("--weights", default="uniform", help="uniform or pareto(alpha)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sketch", help="build coordinated sketches of a collection file")
    s.add_argument("dataset")
    s.add_argument("--family", default="WS", choices=["WS", "PRI", "ws", "pri"])
    s.add_argument("-k", "--k", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sets", nargs="+", help="only sketch these sets")
    s.add_argument("--poisson", action="store_true", help="Poisson samples with expected size k instead")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sketch)

    e = sub.add_parser("estimate", help="estimate a predicate's weight from sketch files")
    e.add_argument("sketches", nargs="+")
    e.add_argument("-p", "--predicate", required=True)
    e.add_argument("--combination", default="best", help="best, UNION, SCS or LCS")
    e.add_argument("--method", default="rc", choices=["rc", "ml"])
    e.add_argument("--dump-combination", metavar="PATH")
    e.set_defaults(func=cmd_estimate)

    o = sub.add_parser("oracle", help="exact predicate weight by full scan")
    o.add_argument("dataset")
    o.add_argument("-p", "--predicate", required=True)
    o.set_defaults(func=cmd_oracle)

    x = sub.add_parser("experiment", help="run a Monte Carlo experiment config and write a results CSV")
    x.add_argument("config", nargs="?")
    x.add_argument("--preset")
    x.add_argument("--repetitions", type=int, help="override the config's repetition count")
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_experiment)

    m = sub.add_parser("summarize", help="improvement factors from a results CSV")
    m.add_argument("results")
    m.add_argument("--baseline", default="union")
    m.add_argument("--tolerance", type=float, default=0.15)
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_summarize)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InapplicableEstimator as exc:
        print(f"inapplicable: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
