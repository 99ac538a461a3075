"""Command-line driver.

Subcommands: validate, run, slice, series, wsplit, report.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, apply_overrides, build_config
from .fdtd import InstabilityError
from .quadrature import QuadratureError
from .spectral import SpectralAliasError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (QuadratureError, InstabilityError, SpectralAliasError,
                    FloatingPointError)


def _load_doc(args) -> dict:
    from .presets import preset_doc
    if args.preset:
        doc = preset_doc(args.preset)
    elif args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    else:
        raise ConfigError("provide a config file or --preset")
    if args.set:
        doc = apply_overrides(doc, args.set)
    return doc


def _config_args(sub):
    sub.add_argument("config", nargs="?", help="JSON run-config path")
    sub.add_argument("--preset", help="built-in preset name")
    sub.add_argument("--set", action="append", default=[],
                     metavar="KEY=VALUE",
                     help="override a config key (dotted path, JSON value)")
    sub.add_argument("--out", help="base directory for outputs",
                     default=".")


def cmd_validate(args) -> int:
    cfg = build_config(_load_doc(args))
    print("configuration valid")
    print(f"  engine: {cfg.engine}")
    print(f"  grid: n={list(cfg.grid_shape)} "
          f"spacing={list(cfg.grid_spacing)} dt={cfg.dt}")
    if cfg.engine in ("fdtd", "both"):
        from .fdtd import default_dt, stability_margin
        grid = cfg.position_grid()
        dt = default_dt(grid) if cfg.dt == "auto" else float(cfg.dt)
        print(f"  stability margin: {stability_margin(grid, dt):.6g} "
              f"(dt={dt:.6g})")
    from .packet import sampled_norm_estimate
    print(f"  sampled norm: {sampled_norm_estimate(cfg.state(), cfg.position_grid()):.9f}")
    return EXIT_OK


def cmd_run(args) -> int:
    from .runner import run_scenario
    cfg = build_config(_load_doc(args))
    result = run_scenario(cfg, base_dir=args.out,
                          verbose=not args.quiet)
    print(f"artifacts written to {result.out_dir}")
    return EXIT_OK


def cmd_series(args) -> int:
    from .runner import run_scenario
    cfg = build_config(_load_doc(args))
    result = run_scenario(cfg, base_dir=args.out, series_only=True,
                          verbose=not args.quiet)
    print(f"series written to {result.out_dir}")
    return EXIT_OK


def cmd_wsplit(args) -> int:
    from .runner import run_scenario
    cfg = build_config(_load_doc(args))
    result = run_scenario(cfg, base_dir=args.out, wsplit_only=True,
                          verbose=not args.quiet)
    print(f"wsplit curves written to {result.out_dir}")
    return EXIT_OK


def cmd_slice(args) -> int:
    from . import observables as obs
    from .fieldio import (export_slice, read_field_dump, slice_indices,
                          take_plane)
    fld = read_field_dump(args.dump)
    plane, _, value = args.plane.partition("=")
    if plane not in ("x", "y", "z") or not value:
        raise ConfigError(f"--plane must look like z=0, got {args.plane!r}")
    try:
        axis, idx = slice_indices(fld.grid, plane, float(value))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    what = args.field
    if what == "density":
        mat = take_plane(fld.density(), axis, idx)
    elif what in ("sigma_x", "sigma_y", "sigma_z"):
        mat = take_plane(obs.spin_density(fld).component(what[-1]),
                         axis, idx)
    else:
        raise ConfigError(f"unknown field {what!r}")
    header = [f"{what} on plane {plane} = {float(value):g} "
              f"at t = {fld.time:.12g}",
              f"grid n = {list(fld.grid.shape)}, "
              f"spacing = {list(fld.grid.spacing)}"]
    export_slice(args.output, mat, header)
    print(f"slice written to {args.output}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .fieldio import read_csv
    from .runner import summarize_series
    base = Path(args.rundir)
    if not base.is_dir():
        raise ConfigError(f"{base} is not a run directory")
    summary = {}
    report_path = base / "report.json"
    if report_path.exists():
        summary["report"] = json.loads(report_path.read_text("utf-8"))
    for csv in sorted(base.glob("**/series.csv")) + \
            sorted(base.glob("oracle_series.csv")):
        label = str(csv.relative_to(base))
        summary[label] = summarize_series(read_csv(csv))
    if not summary:
        raise ConfigError(f"no artifacts found under {base}")
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracpack",
        description="Dual-engine free Dirac wave-packet simulator "
                    "(natural units: hbar = m = c = 1)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output on stderr")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("validate", help="parse and gate-check a config")
    _config_args(sub)
    sub.set_defaults(func=cmd_validate)

    sub = subs.add_parser("run", help="run a full scenario")
    _config_args(sub)
    sub.set_defaults(func=cmd_run)

    sub = subs.add_parser("series", help="observable time series only")
    _config_args(sub)
    sub.set_defaults(func=cmd_series)

    sub = subs.add_parser("wsplit", help="energy-sign momentum curves only")
    _config_args(sub)
    sub.set_defaults(func=cmd_wsplit)

    sub = subs.add_parser("slice", help="export a plane from a field dump")
    sub.add_argument("dump", help="field dump (.dpfd)")
    sub.add_argument("--plane", required=True, help="e.g. z=0")
    sub.add_argument("--field", default="density",
                     choices=("density", "sigma_x", "sigma_y", "sigma_z"))
    sub.add_argument("--output", required=True, help="output text file")
    sub.set_defaults(func=cmd_slice)

    sub = subs.add_parser("report", help="summarize a run directory")
    sub.add_argument("rundir")
    sub.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
