"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 input parse error.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .asymptotics import high_snr_report, large_m_gap, large_m_report, low_snr_report
from .channel import (FadingConfig, first_hop_capacity, load_realization, realization_to_json,
                      sample_channel)
from .checks import all_passed, validate_realization
from .csvio import write_diagnostic_csv, write_region_csv
from .errors import InputFormatError, InvalidInputError
from .montecarlo import load_ensemble_config, run_ensemble
from .schemes import DEFAULT_GRID_SIZE, SCHEMES, apply_first_hop_cap, build_region
from .units import DEFAULT_UNIT, UNITS

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3

# named parameter sets: fading std, relay power, relay count
PRESETS = {
    "fig2": {"sigma_h": 2.0, "sigma_z": 2.0, "p_r": 1.0, "m": 5},
    "fig3": {"sigma_h": 2.0, "sigma_z": 2.0, "p_r": 1.0, "m": 15},
    "fig4": {"sigma_h": 2.0, "sigma_z": 2.0, "p_r": 100.0, "m": 3},
    "fig5": {"sigma_h": 2.0, "sigma_z": 2.0, "p_r": 0.001, "m": 10},
}
DEFAULTS = dict(PRESETS["fig2"], sigma_g=1.0, n0=1.0, seed=0, draw=0)

DEFAULT_PR_GRIDS = {
    "high": [1e2, 1e3, 1e4, 1e5, 1e6],
    "low": [1e-2, 1e-3, 1e-4, 1e-5],
    "large-m": [1.0],
}


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_channel_args(p, with_input=True):
    p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
    if with_input:
        p.add_argument("--input", type=Path, help="realization JSON written by `sample`")
    p.add_argument("--m", type=int, help="number of relays")
    p.add_argument("--sigma-h", type=float)
    p.add_argument("--sigma-z", type=float)
    p.add_argument("--sigma-g", type=float)
    p.add_argument("--n0", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--draw", type=int, help="draw index within the seeded stream")
    p.add_argument("--pr", type=float, help="total relay power")


def build_parser():
    unit = argparse.ArgumentParser(add_help=False)
    unit.add_argument("--unit", choices=UNITS, default=argparse.SUPPRESS,
                      help="rate unit (default bits)")

    parser = argparse.ArgumentParser(prog="relaysec", parents=[unit],
                                     description="Secrecy rate regions of relay beamforming schemes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[unit], help="draw one channel realization")
    _add_channel_args(p, with_input=False)
    p.add_argument("--first-hop", action="store_true", help="also draw source-to-relay channels")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("region", parents=[unit], help="compute region CSV")
    _add_channel_args(p)
    p.add_argument("--schemes", default=",".join(SCHEMES))
    p.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE, help="number of alpha samples")
    p.add_argument("--cap-first-hop", action="store_true")
    p.add_argument("--ps", type=float, help="source power for the first-hop cap")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("validate", parents=[unit], help="run the invariant suite on one realization")
    _add_channel_args(p)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE)
    p.add_argument("--trials", type=int, default=20000, help="brute-force oracle trials")
    p.add_argument("--strict", action="store_true", help="treat advisory checks as failures")

    p = sub.add_parser("asymptotics", parents=[unit], help="asymptotic diagnostics CSV")
    _add_channel_args(p)
    p.add_argument("--regime", choices=sorted(DEFAULT_PR_GRIDS), required=True)
    p.add_argument("--pr-grid", type=_float_list, help="comma-separated relay powers")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m-grid", type=_int_list,
                   help="large-m only: relay counts to average over --draws draws")
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("montecarlo", parents=[unit], help="run an ensemble from a config file")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--per-draw-dir", type=Path)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _settings(args):
    s = dict(DEFAULTS)
    if getattr(args, "preset", None):
        s.update(PRESETS[args.preset])
    for key in ("m", "sigma_h", "sigma_z", "sigma_g", "n0", "seed", "draw"):
        value = getattr(args, key, None)
        if value is not None:
            s[key] = value
    if getattr(args, "pr", None) is not None:
        s["p_r"] = args.pr
    return s


def _fading(s):
    return FadingConfig(m=s["m"], sigma_h=s["sigma_h"], sigma_z=s["sigma_z"],
                        sigma_g=s["sigma_g"], n0=s["n0"], seed=s["seed"])


def _realization(args, s, first_hop=False):
    if getattr(args, "input", None) is not None:
        try:
            return load_realization(args.input)
        except OSError as exc:
            raise InputFormatError(f"{args.input}: {exc}") from exc
    return sample_channel(_fading(s), s["draw"], first_hop=first_hop)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _unit(args):
    return getattr(args, "unit", DEFAULT_UNIT)


def cmd_sample(args):
    s = _settings(args)
    real = sample_channel(_fading(s), s["draw"], first_hop=args.first_hop)
    _emit(realization_to_json(real), args.out)
    return EXIT_OK


def cmd_region(args):
    s = _settings(args)
    schemes = [x.strip() for x in args.schemes.split(",") if x.strip()]
    unknown = [x for x in schemes if x not in SCHEMES]
    if unknown or not schemes:
        raise UsageError(f"unknown schemes {unknown}; choose from {','.join(SCHEMES)}")
    if args.cap_first_hop and not (args.ps and args.ps > 0):
        raise UsageError("--cap-first-hop needs a positive --ps")
    real = _realization(args, s, first_hop=args.cap_first_hop)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    grid = np.linspace(0.0, 1.0, args.grid)
    curves = [build_region(x, real.h, real.z, s["p_r"], real.n0, grid, unit=_unit(args))
              for x in schemes]
    if args.cap_first_hop:
        if real.g is None:
            raise InputFormatError("realization has no first-hop channel g")
        noise = real.noise_relay if real.noise_relay is not None else np.ones(real.m)
        c1 = first_hop_capacity(real.g, args.ps, noise, unit=_unit(args))
        curves = [apply_first_hop_cap(c, c1) for c in curves]
    write_region_csv(curves, args.out or sys.stdout)
    return EXIT_OK


def cmd_validate(args):
    s = _settings(args)
    real = _realization(args, s)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    results = validate_realization(real, s["p_r"], np.linspace(0.0, 1.0, args.grid),
                                   oracle_trials=args.trials, seed=s["seed"], unit=_unit(args))
    for r in results:
        print(r.line())
    ok = all_passed(results, strict=args.strict)
    print(f"{'OK' if ok else 'FAILED'}: {sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_VALIDATION


def _large_m_rows(args, s):
    rows = []
    for m in args.m_grid:
        cfg = FadingConfig(m=m, sigma_h=s["sigma_h"], sigma_z=s["sigma_z"], sigma_g=s["sigma_g"],
                           n0=s["n0"], seed=s["seed"])
        draws = [sample_channel(cfg, i) for i in range(args.draws)]
        for p in args.pr_grid or DEFAULT_PR_GRIDS["large-m"]:
            gd = np.mean([large_m_gap(d.h, d.z, args.alpha, p, d.n0) for d in draws])
            ge = np.mean([large_m_gap(d.z, d.h, 1.0 - args.alpha, p, d.n0) for d in draws])
            rows.append(("large_m", p, args.alpha, f"mean_large_m_gap_d@m={m}", gd))
            rows.append(("large_m", p, args.alpha, f"mean_large_m_gap_e@m={m}", ge))
    return rows


def cmd_asymptotics(args):
    s = _settings(args)
    unit = _unit(args)
    grid = args.pr_grid or ([s["p_r"]] if args.pr is not None else DEFAULT_PR_GRIDS[args.regime])
    if args.regime == "large-m" and args.m_grid:
        rows = _large_m_rows(args, s)
    else:
        real = _realization(args, s)
        if args.regime == "high":
            report = high_snr_report(real.h, real.z, args.alpha, grid, real.n0, unit)
        elif args.regime == "low":
            report = low_snr_report(real.h, real.z, args.alpha, grid, real.n0, unit)
        else:
            report = large_m_report(real.h, real.z, args.alpha, grid, real.n0)
        rows = report.rows()
    write_diagnostic_csv(rows, args.out or sys.stdout)
    return EXIT_OK


def cmd_montecarlo(args):
    cfg = load_ensemble_config(args.config)
    if hasattr(args, "unit"):
        cfg = replace(cfg, unit=args.unit)
    summary = run_ensemble(cfg, workers=args.workers, per_draw_dir=args.per_draw_dir)
    _emit(summary.to_json(), args.out)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "region": cmd_region,
    "validate": cmd_validate,
    "asymptotics": cmd_asymptotics,
    "montecarlo": cmd_montecarlo,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"relaysec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"relaysec: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidInputError as exc:
        print(f"relaysec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
