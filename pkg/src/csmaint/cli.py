"""Command line entry point: ``csmaint {analyze,sample,des,compare,all}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .experiments import PRESETS, cmd_all, cmd_analyze, cmd_compare, cmd_des, cmd_sample, load_config

COMMANDS = {
    "analyze": (cmd_analyze, "p_on fixed point, effective density and the analytic law over the sweep"),
    "sample": (cmd_sample, "Monte Carlo shot noise for the configured point processes"),
    "des": (cmd_des, "packet-level CSMA/CA simulation, pooled interference samples"),
    "compare": (cmd_compare, "KS distances of analytic and Monte Carlo models against the simulator"),
    "all": (cmd_all, "analyze, sample, des and compare in sequence"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csmaint", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="key = value experiment file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in experiment")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--repetitions", type=int)
        p.add_argument("--duration-us", type=int)
        p.add_argument("--iterations", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--no-traces", action="store_true", help="skip per-run event trace files")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _overrides(args) -> dict:
    out = {}
    for arg, name in (("out", "out_dir"), ("seed", "seed"), ("repetitions", "repetitions"),
                      ("duration_us", "duration_us"), ("iterations", "iterations"), ("workers", "workers")):
        value = getattr(args, arg)
        if value is not None:
            out[name] = value
    if args.no_traces:
        out["write_traces"] = False
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.preset)
        cfg = cfg.replace(**_overrides(args))
        paths = COMMANDS[args.command][0](cfg)
    except Exception as exc:
        summary = {"status": "error", "command": args.command,
                   "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(summary), file=sys.stderr)
        return 2
    print(json.dumps({"status": "ok", "command": args.command, "config_sha256": cfg.digest(),
                      "files": paths}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
