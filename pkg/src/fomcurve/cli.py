"""Command-line entry point for the staged pipeline.

Exit codes: 0 on success, 2 on configuration or input validation errors,
3 on numerical failures inside a stage.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import pipeline
from .pipeline import ValidationError
from .textprep import EmptyDocumentError

STAGE_COMMANDS = ["ingest", "topics", "select-k", "curve", "regress", "report"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fomcurve",
        description="Statement topic extraction, yield-curve factor "
                    "estimation, and event-study regressions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGE_COMMANDS + ["all"]:
        p = sub.add_parser(name, help=f"run the {name} stage"
                           if name != "all" else "run every stage in order")
        p.add_argument("--config", required=True, metavar="PATH",
                       help="pipeline configuration file (YAML)")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="override the configured output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured global seed")
        p.add_argument("--stage-force", metavar="NAME", default=None,
                       help="rerun the named stage even if cached "
                            "('all' forces everything)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        cfg = pipeline.load_config(args.config, overrides)
        if args.command == "all":
            statuses = pipeline.run_all(cfg, force_stage=args.stage_force)
            for stage, status in statuses.items():
                print(f"{stage}: {status}")
        else:
            force = args.stage_force in (args.command, "all")
            status, outputs = pipeline.run_stage(cfg, args.command, force=force)
            print(f"{args.command}: {status}")
            for name in outputs:
                print(f"  {name}")
    except (ValidationError, EmptyDocumentError, FileNotFoundError,
            PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError, ZeroDivisionError,
            OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
