"""``balance-field <experiment> --config <path> [--out <dir>] [--snapshots <every>]``.

Exit status: 0 when every verdict passes, 1 when any fails, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="balance-field", description="Run a phase-field reproduction experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, type=Path, help="key = value configuration file")
    p.add_argument("--out", type=Path, help="output directory (overrides the config's output key)")
    p.add_argument("--snapshots", type=int, metavar="EVERY", help="write a volume snapshot every EVERY steps")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.config)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config declares experiment {cfg.experiment!r}, command line asks for {args.experiment!r}")
        if args.snapshots is not None and args.snapshots < 1:
            raise ConfigError("--snapshots must be >= 1")
        result = run_experiment(cfg, args.out, args.snapshots)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    for v in result.verdicts:
        print(v.line())
    for path in result.files:
        print(f"wrote {path}")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
