"""Command-line driver: ``run``, ``convergence`` and ``validate``.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
4 file error, 5 snapshot failed validation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, parse_config, serialize
from .fileio import emit_convergence_table, read_snapshot, write_snapshot
from .implicit import LinearSolverError
from .integrate import StallError, run
from .mesh import AdmissibilityError
from .riemann import PositivityBreach
from .studies import convergence_study

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO, EXIT_INVALID = 0, 2, 3, 4, 5


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaximex",
                                     description="IMEX relaxation solver for scaled Euler flows")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    p_run.add_argument("-c", "--config", help="key = value config file")
    p_run.add_argument("--dimensional", action="store_true",
                       help="write snapshots in dimensional units")
    p_run.add_argument("overrides", nargs="*", metavar="key=value")

    p_conv = sub.add_parser("convergence", help="multi-resolution error sweep")
    p_conv.add_argument("-c", "--config", help="key = value config file")
    p_conv.add_argument("--levels", type=_ints, default=[20, 40, 60, 80])
    p_conv.add_argument("--machs", type=_floats, default=None,
                        help="comma-separated Mach numbers (default: the config value)")
    p_conv.add_argument("--out", help="write the table here as well as to stdout")
    p_conv.add_argument("overrides", nargs="*", metavar="key=value")

    p_val = sub.add_parser("validate", help="check invariants of a CSV snapshot")
    p_val.add_argument("snapshot")
    p_val.add_argument("--gamma", type=float, default=None)
    p_val.add_argument("--mach", type=float, default=None,
                       help="scheme Mach number, enables the local-Mach consistency check")
    p_val.add_argument("--rtol", type=float, default=1e-12)
    return parser


def cmd_run(args) -> int:
    setup = parse_config(args.config, args.overrides)
    cfg, case = setup.config, setup.case
    grid = setup.grid()
    scaling = case.scaling if args.dimensional else None
    out_dir = Path(cfg.output_dir) if cfg.output_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "config.txt").write_text(serialize(setup))

    def on_output(step, t, fld):
        if out_dir is not None:
            write_snapshot(fld, grid, cfg.mach, cfg.gamma, t,
                           out_dir / f"snapshot_{step:06d}.{cfg.format}", cfg.format, scaling)

    result = run(case.initial_field(grid), grid, cfg, on_output=on_output)
    text = result.report.to_text()
    if out_dir is not None:
        (out_dir / "report.json").write_text(text + "\n")
        with open(out_dir / "diagnostics.csv", "w") as fh:
            rows = list(result.diagnostics.as_rows())
            fh.write(",".join(rows[0]) + "\n")
            for row in rows:
                fh.write(",".join("%.17g" % v for v in row.values()) + "\n")
    print(text)
    return EXIT_OK


def cmd_convergence(args) -> int:
    setup = parse_config(args.config, args.overrides)
    name = setup.case.name
    machs = args.machs or [setup.values.get("mach", setup.case.params.get(
        "nominal_mach", setup.case.mach))]
    if len(args.levels) < 2:
        raise ConfigError("need at least two levels", "levels")
    cfg = setup.config
    options = {}
    if "vortex_scaling" in setup.values:
        options["scaling"] = setup.values["vortex_scaling"]
    if "gamma" in setup.values:
        options["gamma"] = setup.values["gamma"]
    results = convergence_study(name, machs, args.levels, cfg, options, t_end=setup.case.t_end)
    table = emit_convergence_table(results, args.out)
    sys.stdout.write(table)
    return EXIT_OK


def validate_snapshot(cols, gamma=None, mach=None, rtol=1e-12):
    """Return a list of failed checks for snapshot columns (empty when valid)."""
    failures = []
    for name, values in cols.items():
        if not np.all(np.isfinite(values)):
            failures.append(f"non-finite values in {name}")
    for name in ("rho", "p", "e"):
        if name not in cols:
            failures.append(f"missing column {name}")
        elif not np.all(cols[name] > 0):
            failures.append(f"non-positive {name} in {int(np.sum(~(cols[name] > 0)))} cell(s)")
    if failures:
        return failures
    ratio = cols["p"] / (cols["rho"] * cols["e"])
    g = (gamma - 1.0) if gamma is not None else float(np.median(ratio))
    dev = float(np.max(np.abs(ratio - g)) / g)
    if dev > rtol * 1e3:
        failures.append(f"p/(rho e) not constant: relative spread {dev:.3e}")
    if mach is not None and "mach_local" in cols:
        speed2 = cols["u"] ** 2 + (cols["v"] ** 2 if "v" in cols else 0.0)
        gam = 1.0 + g
        expect = mach * np.sqrt(speed2) / np.sqrt(gam * cols["p"] / cols["rho"])
        err = float(np.max(np.abs(expect - cols["mach_local"])))
        if err > rtol * 1e3 * max(1.0, float(np.max(expect))):
            failures.append(f"mach_local inconsistent with u, p, rho (max error {err:.3e})")
    return failures


def cmd_validate(args) -> int:
    cols = read_snapshot(args.snapshot)
    failures = validate_snapshot(cols, args.gamma, args.mach, args.rtol)
    summary = {"snapshot": str(args.snapshot), "cells": int(len(next(iter(cols.values())))),
               "valid": not failures, "failures": failures}
    print(json.dumps(summary, indent=2))
    return EXIT_OK if not failures else EXIT_INVALID


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": cmd_run, "convergence": cmd_convergence, "validate": cmd_validate}
    try:
        return handler[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AdmissibilityError, PositivityBreach, LinearSolverError, StallError) as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
