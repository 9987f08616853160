"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 1 runtime or integration error.
The worker thread count can be set with ``MAXBLOCH_THREADS``.
"""

from __future__ import annotations

import argparse
import sys

from .config import SCENARIOS, ConfigError, load
from .harness import THREADS_ENV, run_scenario
from .params import DomainError
from .propagate import AccuracyBudgetError, IntegrationError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="maxbloch",
        description="Maxwell-Bloch pump/probe propagation through a dense two-level medium.",
        epilog=f"Set {THREADS_ENV}=N to limit the number of concurrent propagations.",
    )
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", required=True, help="flat key = value config file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--members", type=int, help="ensemble size (overrides ensemble_m)")
    p.add_argument("--full-history", action="store_true",
                   help="also write every z slice of the field to history.npz")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.members is not None:
        overrides["ensemble_m"] = args.members
    if args.full_history:
        overrides["full_history"] = True
    try:
        config = load(args.config, args.scenario, **overrides)
    except ConfigError as exc:
        print(f"maxbloch: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outputs = run_scenario(config)
    except DomainError as exc:  # includes grid resolution failures
        print(f"maxbloch: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, AccuracyBudgetError) as exc:
        print(f"maxbloch: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in outputs.files:
        print(path)
    print(outputs.manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
