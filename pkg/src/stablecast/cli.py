"""Command-line entry points.

Verbs: ``validate`` (config check), ``generate`` (synthetic panel CSV),
``run`` (full pipeline), ``report`` (re-emit wide tables from a stored
metric CSV). Exit codes: 0 success, 1 configuration/validation problem,
2 runtime failure. ``STABLECAST_OUTPUT_DIR`` and ``STABLECAST_WORKERS``
override the output directory and worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from ._version import __version__
from .errors import (
    ConfigurationError,
    EmptyPanelError,
    PanelValidationError,
    SchemaError,
    StablecastError,
)
from .panel import save_panel
from .pipeline import RunConfig, reemit_tables, run
from .simulate import SynthSpec, generate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

_VALIDATION_ERRORS = (ConfigurationError, SchemaError, PanelValidationError, EmptyPanelError)


def _apply_env(config: RunConfig) -> RunConfig:
    out_dir = os.environ.get("STABLECAST_OUTPUT_DIR")
    workers = os.environ.get("STABLECAST_WORKERS")
    if out_dir:
        config = replace(config, output_dir=Path(out_dir).resolve())
    if workers:
        try:
            config = replace(config, workers=int(workers))
        except ValueError:
            raise ConfigurationError(
                f"STABLECAST_WORKERS must be an integer, got {workers!r}"
            ) from None
    return config


def _cmd_validate(args) -> int:
    config = RunConfig.from_json(args.config)
    print(f"config ok: hash {config.config_hash()[:12]}, "
          f"{len(config.models)} model(s), {len(config.external)} external source(s), "
          f"scenarios {list(config.evaluation.retrain_windows)}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    from .pipeline import frequency_from

    spec_data = json.loads(Path(args.spec).read_text()) if args.spec else {}
    frequency = frequency_from(spec_data.pop("frequency", "daily"))
    if args.seed is not None:
        spec_data["seed"] = args.seed
    spec = SynthSpec(frequency=frequency, **spec_data)
    panel = generate(spec)
    save_panel(panel, args.out)
    print(f"wrote {panel.n_series} series x {panel.length(panel.series_ids[0])} "
          f"observations to {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = _apply_env(RunConfig.from_json(args.config))
    if args.output_dir:
        config = replace(config, output_dir=Path(args.output_dir).resolve())
    if args.workers:
        config = replace(config, workers=args.workers)
    manifest = run(config)
    print(f"run complete: {len(manifest.files)} artifact file(s) in {config.output_dir}")
    for name in sorted(manifest.files):
        print(f"  {name}")
    if manifest.warnings:
        print(f"{len(manifest.warnings)} warning(s); see manifest.json")
    return EXIT_OK


def _cmd_report(args) -> int:
    written = reemit_tables(
        args.metrics, baseline_r=args.baseline_r, out_dir=args.out, decimals=args.decimals
    )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablecast",
        description="Evaluate forecast stability and accuracy under retraining schedules.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a run configuration")
    p_validate.add_argument("config", help="path to the JSON run config")
    p_validate.set_defaults(func=_cmd_validate)

    p_generate = sub.add_parser("generate", help="write a synthetic panel CSV")
    p_generate.add_argument("--spec", help="JSON file with synthetic-panel fields")
    p_generate.add_argument("--seed", type=int, default=None)
    p_generate.add_argument("--out", required=True, help="output CSV path")
    p_generate.set_defaults(func=_cmd_generate)

    p_run = sub.add_parser("run", help="execute the full evaluation pipeline")
    p_run.add_argument("config", help="path to the JSON run config")
    p_run.add_argument("--output-dir", help="override the configured output directory")
    p_run.add_argument("--workers", type=int, help="override the worker count")
    p_run.set_defaults(func=_cmd_run)

    p_report = sub.add_parser("report", help="re-emit wide tables from a metric CSV")
    p_report.add_argument("metrics", help="path to a stored metrics_long.csv")
    p_report.add_argument("--baseline-r", type=int, required=True)
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.add_argument("--decimals", type=int, default=3)
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StablecastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
