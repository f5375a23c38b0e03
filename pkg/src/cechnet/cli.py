"""Command line entry point: ``cechnet build|holes|optimize|render``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import commands
from .scenario import ScenarioError, load_scenario

log = logging.getLogger("cechnet")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cechnet", description="Distributed Čech complex simulator.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("build", "distributed Čech complex"),
                        ("holes", "coverage-hole boundary cycles"),
                        ("optimize", "distributed power reduction"),
                        ("render", "SVG picture of cells and complex")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--scenario", required=True,
                       help="scenario JSON file, or a bundled name (fig2, redundant5, collision, dumbbell)")
        s.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--no-oracle-check", action="store_true",
                       help="skip comparing against the centralized build")
        s.add_argument("--dim-max", type=int, default=None, help="highest simplex dimension")
        if name == "render":
            s.add_argument("--result", default=None,
                           help="optimize output directory; render its final radii")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        sc = load_scenario(args.scenario)
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2 ** 64:
                raise ScenarioError("seed must be an unsigned 64-bit integer")
            sc = sc.replace(seed=args.seed)
        if args.dim_max is not None:
            if args.dim_max < 1:
                raise ScenarioError("--dim-max must be >= 1")
            sc = sc.replace(dim_max=args.dim_max)
        check = not args.no_oracle_check
        if args.command == "build":
            outcome = commands.cmd_build(sc, check)
        elif args.command == "holes":
            outcome = commands.cmd_holes(sc, check)
        elif args.command == "optimize":
            outcome = commands.cmd_optimize(sc, check)
        else:
            outcome = commands.cmd_render(sc, args.result)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return commands.EXIT_BAD_INPUT
    outcome.write(args.out)
    if outcome.exit_code:
        print(f"error: {outcome.message}", file=sys.stderr)
    else:
        log.info("wrote %s to %s", ", ".join(sorted(outcome.files)), args.out)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
