"""
Command-line entry point.

Each subcommand runs one experiment mode from a JSON config::

    oscneg negativity config.json --set ensemble.N=2 --output out/run1

Errors are reported as one JSON object on stderr and a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import run

COMMANDS = {
    "negativity": "exact",
    "bounds": "bounds-only",
    "sweep": "sweep",
    "energy": "energy",
    "decay-fit": "decay-fit",
    "oracle-check": "oracle-check",
}

_HELP = {
    "negativity": "exact log-negativity with certified tail, plus both bounds",
    "bounds": "product and h bounds only, no enumeration",
    "sweep": "disorder-averaged area-law sweep over sizes and N",
    "energy": "closed-form versus sector-averaged ensemble energies",
    "decay-fit": "fit exponential decay of the disorder-averaged h^{-1/2} kernel",
    "oracle-check": "compare exact log-negativity with the truncated Fock oracle",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscneg", description=__doc__.split("\n\n")[1].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("config", nargs="?", help="JSON config file (defaults apply when omitted)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a dotted config key; VALUE is parsed as JSON when possible")
        p.add_argument("--output", help="output path prefix (writes PREFIX.csv and PREFIX.json)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.output is not None:
        overrides.append("output=" + json.dumps(args.output))
    code, artifacts = run(args.config, overrides, mode=COMMANDS[args.command])
    if "error" in artifacts:
        print(json.dumps(artifacts["error"]), file=sys.stderr)
    else:
        print(json.dumps({k: v for k, v in artifacts.items() if k != "summary"}))
        if code:
            print(json.dumps({"error": "check-failed", "summary": artifacts["summary"]}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
