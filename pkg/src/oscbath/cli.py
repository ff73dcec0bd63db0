"""Command-line scenario runner.

Subcommands: fig1 | fig2 | fig3 | fig4 | run <config> | acceptance.
Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ConfigError, IntegrationError, TruncationError


def _parse_set(pairs):
    """--set a.b.c=value overrides; values parse as JSON, else strings."""
    tree = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = tree
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path {key!r} collides with a scalar")
        node[parts[-1]] = value
    return tree


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscbath",
        description="Oscillator relaxation/decoherence scenarios and checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--set", action="append", dest="overrides", metavar="KEY=VALUE",
                       help="override a config leaf (dotted path, JSON value)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--gnuplot", action="store_true",
                       help="also emit gnuplot scripts next to the CSVs")

    for fig in ("fig1", "fig2", "fig3", "fig4"):
        common(sub.add_parser(fig, help=f"run the {fig} preset"))
    prun = sub.add_parser("run", help="run a scenario config file")
    prun.add_argument("config", help="path to a JSON scenario config")
    common(prun)
    pacc = sub.add_parser("acceptance", help="run the acceptance criteria")
    pacc.add_argument("--out", default="out", help="output directory")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "acceptance":
            from .acceptance import run_acceptance

            os.makedirs(args.out, exist_ok=True)
            report = run_acceptance(os.path.join(args.out, "acceptance.json"))
            print(f"{report['n_passed']}/{report['n_total']} criteria passed")
            return 0 if report["passed"] else 3

        from . import scenarios as sc

        overrides = _parse_set(args.overrides)
        if args.command == "run":
            with open(args.config) as fh:
                tree = json.load(fh)
            config = sc.ScenarioConfig.from_dict(tree, overrides)
            result = sc.run_scenario(config)
        else:
            config = sc.FIGURE_CONFIGS[args.command](overrides)
            result = sc.FIGURES[args.command](config)
        written = sc.write_result(result, args.out, fmt=args.format,
                                  gnuplot=args.gnuplot)
        for path in written:
            print(path)
        return 0
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, TruncationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
