"""Command-line entry point: ``rfexposure sweep|compare|validate|presets``.

Exit codes: 0 success, 1 validation error, 2 runtime/model error.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .antenna import combined_attenuation, element_gain
from .exposure import TissueError
from .output import emit_csv, emit_plot
from .propagation import ModelError
from .scenario import (ConfigError, SweepError, compare_systems, load_config, preset_names,
                       provenance_log, run_metadata, run_sweep)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2
FIGURE_COLUMNS = ["p_r_dbm", "rate_bps", "s_i_w_m2", "sar_w_kg"]


def _load(path, args):
    config = load_config(path)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        overrides["sweep.mode"] = args.mode
    return config.with_overrides(overrides) if overrides else config


def cmd_sweep(args):
    config = _load(args.config[0], args)
    rows = run_sweep(config)
    prefix = Path(args.out or config.output)
    meta = run_metadata(config, rows)
    written = []
    if args.format in ("csv", "both"):
        written.append(emit_csv(rows, prefix.with_suffix(".csv"), metadata=meta))
    if args.format in ("svg", "both"):
        written.append(emit_plot(rows, FIGURE_COLUMNS, prefix.with_suffix(".svg"),
                                 title=config.label, metadata=meta))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_compare(args):
    if len(args.config) != 2:
        raise ConfigError("compare needs exactly two --config values")
    ca, cb = (_load(p, args) for p in args.config)
    ra, rb = run_sweep(ca), run_sweep(cb)
    report = compare_systems(ra, rb, label_a=ca.label, label_b=cb.label)
    print(report.to_text())
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        prefix.with_suffix(".json").write_text(json.dumps(report.to_dict(), indent=2) + "\n",
                                               encoding="utf-8")
        if args.format in ("svg", "both"):
            emit_plot(ra, FIGURE_COLUMNS, prefix.with_suffix(".svg"),
                      series={ca.label: ra, cb.label: rb},
                      title=f"{ca.label} vs {cb.label}")
    return EXIT_OK


def self_test(config):
    """Schema already passed; run module invariants on the configured scenario."""
    checks = []
    phi = np.linspace(-180, 180, 361)
    theta = np.linspace(0, 180, 181)
    pp, tt = np.meshgrid(phi, theta)
    att = combined_attenuation(config.pattern, pp, tt)
    checks.append(("attenuation within [0, A_m]",
                   bool(np.all((att >= 0) & (att <= config.pattern.a_m)))))
    checks.append(("peak gain at boresight",
                   bool(np.isclose(element_gain(config.pattern, 0.0, 90.0),
                                   config.pattern.g_max))))
    prof = config.link_model().profile
    d = np.arange(0.0, 5000.0, 1.0)
    p = prof.los_probability(d, config.ue_height)
    checks.append(("LOS probability in [0, 1] and non-increasing",
                   bool(np.all((p >= 0) & (p <= 1)) and np.all(np.diff(p) <= 1e-12))))
    rows = run_sweep(config)
    checks.append(("sweep rows non-negative rate/PD/SAR",
                   all(r.rate_bps >= 0 and r.s_i_w_m2 >= 0 and r.sar_w_kg >= 0 for r in rows)))
    return checks


def cmd_validate(args):
    status = EXIT_OK
    for path in args.config:
        config = _load(path, args)
        print(f"{path}: schema ok")
        if args.verbose:
            for line in provenance_log(config):
                print("  " + line)
        for name, ok in self_test(config):
            print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
            if not ok:
                status = EXIT_RUNTIME
    return status


def cmd_presets(args):
    for name in preset_names():
        config = load_config(name)
        print(f"{name:14s} {config.label}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rfexposure",
                                     description="Downlink RF exposure and link sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, multi=False):
        p.add_argument("--config", action="append", required=True,
                       help="config file or preset name" + (" (repeatable)" if multi else ""))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--mode", choices=["line", "drop"], default=None)

    p = sub.add_parser("sweep", help="run one scenario sweep")
    common(p)
    p.add_argument("--out", help="output path prefix (extension added)")
    p.add_argument("--format", choices=["csv", "svg", "both"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="compare two scenarios on a shared grid")
    common(p, multi=True)
    p.add_argument("--out", help="output prefix for the JSON report (and SVG)")
    p.add_argument("--format", choices=["csv", "svg", "both"], default="csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="schema check and invariant self-test")
    common(p, multi=True)
    p.add_argument("-v", "--verbose", action="store_true", help="print the provenance log")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="shipped presets")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ModelError, TissueError, SweepError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
