"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments, 2 I/O failure, 3 selfcheck failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from .linalg import InvalidInputError
from .sweeps import QUANTITIES, SweepSpec, companion_path, default_seed, run, write_result

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_SELFCHECK = 0, 1, 2, 3

_PI_EXPR = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/4``, ``3pi/8`` or ``0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    return coef * math.pi / (float(m.group(2)) if m.group(2) else 1.0)


def parse_angles(text: str) -> list[float]:
    """Comma-separated angles, or a grid ``lo:hi:n`` with n >= 2 points."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid spec must be lo:hi:n, got {text!r}")
        lo, hi = parse_angle(parts[0]), parse_angle(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid size must be an integer, got {parts[2]!r}") from None
        if n < 2:
            raise argparse.ArgumentTypeError("grid size must be at least 2")
        return [float(v) for v in np.linspace(lo, hi, n)]
    return [parse_angle(p) for p in text.split(",") if p.strip()]


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unruhbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in QUANTITIES:
        p = sub.add_parser(name)
        p.add_argument("--phi", type=parse_angles, help="angle, list a,b,c or grid lo:hi:n")
        p.add_argument("--theta-u", type=parse_angles, help="Unruh angle(s), same syntax as --phi")
        p.add_argument("--theta2", type=parse_angles, help="bmk3-slice only: polar angles of party 2")
        p.add_argument("--pair", choices=["ai", "aii", "iii"], default="ai")
        p.add_argument("--grid", type=int, help="points per angle axis")
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--seed", type=_u64, help="optimizer seed (falls back to $UNRUH_SEED)")
        p.add_argument("--starts", type=int, help="optimizer starts per cell")
        p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("selfcheck")
    p.add_argument("--seed", type=_u64)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = default_seed(args.seed)
    except ValueError:
        print("unruhbell: error: UNRUH_SEED is not an integer", file=sys.stderr)
        return EXIT_ARGS

    if args.command == "selfcheck":
        from .selfcheck import run_selfcheck

        results = run_selfcheck(seed)
        return EXIT_OK if all(r.passed for r in results) else EXIT_SELFCHECK

    try:
        spec = SweepSpec(
            quantity=args.command,
            phi=args.phi,
            theta_u=args.theta_u,
            theta2=args.theta2,
            pair=args.pair,
            grid=args.grid,
            seed=seed,
            starts=args.starts,
            workers=args.workers,
        )
    except (ValueError, InvalidInputError) as exc:
        print(f"unruhbell: error: {exc}", file=sys.stderr)
        return EXIT_ARGS

    # Fail on an unwritable destination before spending time on the sweep.
    try:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "a"):
            pass
    except OSError as exc:
        print(f"unruhbell: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO

    outputs = run(spec)

    for suffix, result in outputs:
        path = companion_path(args.out, suffix)
        try:
            write_result(result, path, args.format)
        except OSError as exc:
            print(f"unruhbell: cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {len(result.rows)} rows to {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
