"""Command line: ``tmpkit analyze|symmetric|generate``.

Reports go to stdout as JSON, a short human log to stderr.
"""

from __future__ import annotations

import argparse
import sys

import mpmath

from . import formats, report
from .exact import parse_rational
from .moments import CurveParams


def _options(args) -> report.Options:
    return report.Options(
        precision_bits=args.precision_bits,
        tolerance=mpmath.mpf(args.tolerance),
        root_branch=args.root_branch,
        mode=args.mode,
        timing=args.timing,
        seed=args.seed,
    )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _solve(args, runner) -> int:
    try:
        text = _read(args.file)
        beta, curve, _ = formats.parse_moments(text)
    except (OSError, formats.InputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return report.EXIT_INVALID
    rep = runner(beta, curve, _options(args), formats.digest(text))
    sys.stdout.write(formats.dumps(rep.data))
    for line in rep.log:
        print(line, file=sys.stderr)
    return rep.exit_code


def _curve(text: str) -> CurveParams:
    try:
        a, b = text.split(",")
        return CurveParams(parse_rational(a.strip()), parse_rational(b.strip()))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b with rational a and b, got {text!r}") from None


def _generate(args) -> int:
    sym = True if args.symmetric else None
    try:
        obj = formats.generate(args.curve, args.atoms, args.seed, n=args.n, symmetric=sym)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return report.EXIT_INVALID
    sys.stdout.write(formats.dumps(obj))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmpkit", description="Truncated moment problems on y^2 = x^3 + ax + b.")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="moment JSON file, or - for stdin")
        p.add_argument("--precision-bits", type=int, default=128)
        p.add_argument("--tolerance", default="1e-20")
        p.add_argument("--root-branch", choices=["auto", "minus", "plus", "both"], default="auto")
        p.add_argument("--mode", choices=["exact", "numeric", "auto"], default="auto")
        p.add_argument("--seed", type=int, default=0, help="seed for the eigen-step retries")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
        return p

    solver("analyze", "flat-extension analysis of pure data")
    solver("symmetric", "symmetric data through the univariate reduction")
    g = sub.add_parser("generate", help="moment data from seeded rational atoms")
    g.add_argument("--curve", type=_curve, default=CurveParams(0, 0), help="a,b (default 0,0)")
    g.add_argument("--atoms", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=3, help="moments up to degree 2n")
    g.add_argument("--symmetric", action="store_true", help="(x, +-y) pairs even on y^2 = x^3")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return _solve(args, report.analyze)
    if args.command == "symmetric":
        return _solve(args, report.symmetric)
    return _generate(args)


if __name__ == "__main__":
    sys.exit(main())
