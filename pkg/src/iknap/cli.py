"""Command-line front end: ``iknap solve | gen | bench``.

Exit codes: 0 success, 1 bench bound violation or internal error,
2 algorithm/variant mismatch, 3 unreadable or malformed instance.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import bench as benchmod
from .generate import FAMILIES, generate
from .model import (
    CONTINUOUS,
    DISCRETE,
    InvariantError,
    ParseError,
    VariantError,
    parse_instance,
    serialize_instance,
    validate,
)

EXIT_FAIL, EXIT_VARIANT, EXIT_PARSE = 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    try:
        instance = parse_instance(Path(args.instance).read_bytes())
    except OSError as exc:
        print(f"error: cannot read {args.instance}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"error: {args.instance}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    problems = validate(instance)
    if problems:
        for v in problems:
            print(f"error: {args.instance}: {v}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = benchmod.run(args.algo, instance, args.eps)
    except VariantError as exc:
        print(f"error: {args.algo} does not apply to this instance: {exc}", file=sys.stderr)
        return EXIT_VARIANT
    if args.with_oracle:
        opt = benchmod.optimum(instance)
        if opt is not None:
            report = report.with_oracle(opt)
    report = replace(report, instance_id=Path(args.instance).stem)
    _write(report.to_json() + "\n", args.out)
    return 0


def cmd_gen(args) -> int:
    instance = generate(args.n, args.seed, args.family, args.levels, args.mode)
    data = serialize_instance(instance)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in benchmod.ALGORITHMS]
    if unknown:
        print(f"error: unknown algorithms {unknown}", file=sys.stderr)
        return EXIT_VARIANT
    result = benchmod.bench(
        args.family, args.count, algos, eps=args.eps, max_n=args.max_n,
        levels=args.levels, mode=args.mode, first_seed=args.first_seed,
    )
    _write(result.to_csv(), args.csv)
    for row in result.summary:
        print(f"{row['algo']}: worst ratio {row['ratio'] or '-'}", file=sys.stderr)
    for failure in result.failures:
        print(f"violation: {failure}", file=sys.stderr)
    return 0 if result.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iknap", description="Improvable knapsack solvers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("instance")
    p.add_argument("--algo", required=True, choices=sorted(benchmod.ALGORITHMS))
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--out")
    p.add_argument("--with-oracle", action="store_true",
                   help="attach the brute-force optimum and empirical ratio")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=FAMILIES, default="uniform")
    p.add_argument("--mode", choices=(DISCRETE, CONTINUOUS), default=DISCRETE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="check approximation bounds against brute force")
    p.add_argument("--family", choices=FAMILIES, default="uniform")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--algos", default="dp,lp3")
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--mode", choices=(DISCRETE, CONTINUOUS), default=DISCRETE)
    p.add_argument("--first-seed", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen" and args.n < 0:
        print("error: --n must be nonnegative", file=sys.stderr)
        return EXIT_VARIANT
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
