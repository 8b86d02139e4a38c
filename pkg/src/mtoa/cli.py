"""Command line front end: ``mtoa <mode> --config spec.json --out rows.csv``.

Exit codes: 0 success, 2 configuration error (bad JSON, schema violation,
unreadable config), 3 numerical failure (fixed point not converged,
infeasible fairness floor).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigurationError, ConvergenceError, FairnessFloorError
from .harness import MODES, parse_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtoa",
        description="Bandit random-access experiments: simulation, analysis, "
                    "tradeoff sweeps, and parameter tuning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a '{mode}' experiment spec")
        p.add_argument("--config", required=True, help="path to the JSON spec")
        p.add_argument("--out", help="CSV output path (overrides spec output_path)")
        p.add_argument("--summary-out", help="optional JSON summary path")
        p.add_argument("--full-scale", action="store_true",
                       help="default horizon 1e7 instead of 1e6 when the spec omits T")
        p.add_argument("--workers", type=int, default=1,
                       help="concurrent replication workers (simulate/compare)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"mtoa: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        spec = parse_config(text)
        if spec.mode != args.command:
            raise ConfigurationError(
                f"config mode {spec.mode!r} does not match subcommand {args.command!r}"
            )
        if args.workers < 1:
            raise ConfigurationError("--workers must be >= 1")
        rows, summary = run_experiment(
            spec, out_path=args.out, summary_path=args.summary_out,
            full_scale=args.full_scale, workers=args.workers,
        )
    except ConfigurationError as exc:
        print(f"mtoa: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FairnessFloorError) as exc:
        print(f"mtoa: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"mtoa: {args.command} finished, {len(rows)} rows"
          + (f" -> {args.out}" if args.out else ""))
    return EXIT_OK


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
