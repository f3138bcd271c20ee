"""Command-line front end.

Subcommands: solve (one scenario, optional per-iteration trace), sweep
(grid of runs to CSV), validate (config check only), dump-channels
(sampled channel coefficients to CSV). Configuration comes from an
optional flat key=value file, then repeatable --set overrides, then
--seed; identical inputs give byte-identical output files, so runs are
reproducible. Exit codes: 0 success, 1 runtime failure such as an
infeasible scenario, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .ao import AOOptions, InfeasibleError, solve_scenario
from .bench import (SCHEMES, SWEEP_PARAMETERS, SweepSpec, run_sweep,
                    rows_to_csv_text, summarize, write_csv)
from .channel import channel_rows, sample_channels
from .scenario import (ConfigError, ScenarioConfig, build_config, lin_to_db,
                       parse_config_text)

__all__ = ["main", "build_parser"]

_SWEEP_KEYS = ("sweep_param", "sweep_grid", "sweep_seeds", "sweep_schemes")
_INT_GRID_PARAMS = ("n_elements", "k_users", "m_antennas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-isac",
        description="Joint transmit/reflect beamforming runs and sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("solve", "optimize one scenario and report per-slot results"),
            ("sweep", "run a parameter sweep and write rows as CSV"),
            ("validate", "check a configuration and exit"),
            ("dump-channels", "write sampled channel coefficients as CSV")):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", metavar="PATH",
                         help="key = value configuration file")
        cmd.add_argument("--set", metavar="KEY=VALUE", action="append",
                         default=[], dest="overrides",
                         help="override one config key (repeatable)")
        cmd.add_argument("--out", metavar="PATH",
                         help="output CSV path (default: stdout)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="RNG seed; applied after --set")
        cmd.add_argument("--quiet", "-q", action="store_true",
                         help="suppress the stdout report")
        cmd.add_argument("--trace", action="store_true",
                         help="solve: write per-iteration rows instead "
                              "of per-slot rows")
        cmd.add_argument("--jobs", type=int, default=None,
                         help="worker processes for sweeps (default: "
                              "RIS_ISAC_JOBS or the CPU count)")
    return parser


def _load_raw(args) -> dict:
    raw = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}")
    for item in args.overrides:
        key, sep, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        raw[key] = value
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    return raw


def _split_sweep(raw: dict):
    sweep_raw = {k: raw.pop(k) for k in list(raw) if k in _SWEEP_KEYS}
    return raw, sweep_raw


def _sweep_spec(sweep_raw: dict) -> SweepSpec:
    if "sweep_param" not in sweep_raw:
        raise ConfigError("sweep requires sweep_param "
                          f"(one of {', '.join(SWEEP_PARAMETERS)})")
    param = sweep_raw["sweep_param"]
    if param not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown sweep_param {param!r}")
    if "sweep_grid" not in sweep_raw:
        raise ConfigError("sweep requires sweep_grid (comma-separated values)")
    cast = int if param in _INT_GRID_PARAMS else float
    try:
        grid = tuple(cast(p.strip()) for p in sweep_raw["sweep_grid"].split(","))
    except ValueError as exc:
        raise ConfigError(f"sweep_grid: {exc}")
    if "sweep_seeds" in sweep_raw:
        try:
            seeds = tuple(int(p.strip())
                          for p in sweep_raw["sweep_seeds"].split(","))
        except ValueError as exc:
            raise ConfigError(f"sweep_seeds: {exc}")
    else:
        seeds = tuple(range(20))
    if "sweep_schemes" in sweep_raw:
        schemes = tuple(p.strip() for p in sweep_raw["sweep_schemes"].split(","))
        for s in schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r} in sweep_schemes")
    else:
        schemes = SCHEMES
    try:
        return SweepSpec(parameter=param, grid=grid, seeds=seeds,
                         schemes=schemes)
    except ValueError as exc:
        raise ConfigError(str(exc))


def _jobs(args) -> int:
    if args.jobs is not None:
        jobs = args.jobs
    elif os.environ.get("RIS_ISAC_JOBS"):
        try:
            jobs = int(os.environ["RIS_ISAC_JOBS"])
        except ValueError:
            raise ConfigError("RIS_ISAC_JOBS must be an integer")
    else:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return jobs


def _emit(path, text: str) -> None:
    if path:
        write_csv(path, text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _solve_csv(sols, trace: bool) -> str:
    if trace:
        lines = ["slot,iteration,sum_rate_bps_hz,radar_snr_db,power_w"]
        for sol in sols:
            for it, (sr, snr, pw) in enumerate(sol.trace_detail):
                lines.append(f"{sol.slot},{it},{_fmt(sr)},"
                             f"{_fmt(lin_to_db(snr))},{_fmt(pw)}")
    else:
        lines = ["slot,sum_rate_bps_hz,radar_snr_db,power_w,iterations,converged"]
        for sol in sols:
            lines.append(f"{sol.slot},{_fmt(sol.sum_rate)},"
                         f"{_fmt(lin_to_db(sol.radar_snr_lin))},"
                         f"{_fmt(sol.power_w)},{sol.iterations},"
                         f"{int(sol.converged)}")
    return "\n".join(lines) + "\n"


def _cmd_solve(cfg: ScenarioConfig, args) -> int:
    sols = solve_scenario(cfg, AOOptions())
    if args.out or args.trace:
        _emit(args.out, _solve_csv(sols, args.trace))
    if not args.quiet:
        mean_sr = sum(s.sum_rate for s in sols) / len(sols)
        mean_snr = sum(s.radar_snr_lin for s in sols) / len(sols)
        mean_it = sum(s.iterations for s in sols) / len(sols)
        print(f"slots {len(sols)}")
        print(f"sum_rate_bps_hz {_fmt(mean_sr)}")
        print(f"radar_snr_db {_fmt(lin_to_db(mean_snr))}")
        print(f"power_w {_fmt(sum(s.power_w for s in sols) / len(sols))}")
        print(f"iterations_mean {_fmt(mean_it)}")
        print(f"converged {sum(s.converged for s in sols)}/{len(sols)}")
    return 0


def _cmd_sweep(cfg: ScenarioConfig, sweep_raw: dict, args) -> int:
    spec = _sweep_spec(sweep_raw)
    rows = run_sweep(spec, cfg, jobs=_jobs(args))
    _emit(args.out, rows_to_csv_text(rows))
    if not args.quiet:
        for s in summarize(rows):
            print(f"{s.scheme} {s.param}={_fmt(s.param_value)} "
                  f"mean {_fmt(s.sum_rate_mean)} "
                  f"stderr {_fmt(s.sum_rate_stderr)} "
                  f"ok {s.n_ok} infeasible {s.n_infeasible}")
    return 0


def _cmd_validate(cfg: ScenarioConfig, args) -> int:
    if not args.quiet:
        print(f"config ok: M={cfg.m_antennas} N={cfg.n_elements} "
              f"K={cfg.k_users} L={cfg.l_slots} seed={cfg.seed}")
    return 0


def _cmd_dump_channels(cfg: ScenarioConfig, args) -> int:
    lines = ["slot,name,row,col,re,im"]
    for slot in range(cfg.l_slots):
        for rec in channel_rows(sample_channels(cfg, slot), slot):
            slot_i, name, row, col, re, im = rec
            lines.append(f"{slot_i},{name},{row},{col},{float(re)!r},{float(im)!r}")
    _emit(args.out, "\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = _load_raw(args)
        scenario_raw, sweep_raw = _split_sweep(raw)
        cfg = build_config(scenario_raw)
        if args.command == "solve":
            return _cmd_solve(cfg, args)
        if args.command == "sweep":
            return _cmd_sweep(cfg, sweep_raw, args)
        if args.command == "validate":
            return _cmd_validate(cfg, args)
        return _cmd_dump_channels(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
