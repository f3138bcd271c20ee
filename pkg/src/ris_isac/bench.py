"""Comparison schemes and the seeded sweep harness.

Three schemes share one code path: "proposed" runs the full loop,
"random-phase" freezes the seeded random phases and optimizes beams
only, "no-ris" removes the surface (N = 0). Sweeps evaluate the
Cartesian product of scheme, grid value, and seed; rows are keyed so any
execution order (serial or worker pool) produces identical output.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ao import AOOptions, InfeasibleError, solve_scenario
from .scenario import ScenarioConfig, lin_to_db, with_overrides

__all__ = [
    "SCHEMES",
    "SWEEP_PARAMETERS",
    "CSV_COLUMNS",
    "SUMMARY_COLUMNS",
    "SweepSpec",
    "RunRow",
    "SummaryRow",
    "scheme_config",
    "run_scheme",
    "run_cell",
    "run_sweep",
    "summarize",
    "rows_to_csv_text",
    "summary_to_csv_text",
    "write_csv",
]

SCHEMES = ("proposed", "random-phase", "no-ris")
SWEEP_PARAMETERS = ("p_max_dbm", "n_elements", "alpha_bs_luav", "k_users",
                    "m_antennas")
_INT_PARAMETERS = ("n_elements", "k_users", "m_antennas")

CSV_COLUMNS = ("scheme", "param", "param_value", "seed", "sum_rate_bps_hz",
               "radar_snr_db", "power_w", "iterations", "wall_ms", "status")
SUMMARY_COLUMNS = ("scheme", "param", "param_value", "n_ok", "n_infeasible",
                   "sum_rate_mean", "sum_rate_stderr", "radar_snr_db_mean")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    grid: tuple
    seeds: tuple = tuple(range(20))
    schemes: tuple = SCHEMES

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; "
                             f"choose from {', '.join(SWEEP_PARAMETERS)}")
        if not self.grid:
            raise ValueError("sweep grid must be non-empty")
        if not self.seeds:
            raise ValueError("sweep seeds must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")


@dataclass(frozen=True)
class RunRow:
    scheme: str
    param: str
    param_value: float
    seed: int
    sum_rate_bps_hz: float
    radar_snr_db: float
    power_w: float
    iterations: float
    wall_ms: float
    status: str


@dataclass(frozen=True)
class SummaryRow:
    scheme: str
    param: str
    param_value: float
    n_ok: int
    n_infeasible: int
    sum_rate_mean: float
    sum_rate_stderr: float
    radar_snr_db_mean: float


def scheme_config(scheme: str, cfg: ScenarioConfig,
                  seed: int | None = None) -> ScenarioConfig:
    """Per-scheme view of a config; no-ris drops every surface element."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    changes = {}
    if seed is not None:
        changes["seed"] = int(seed)
    if scheme == "no-ris" and cfg.n_elements != 0:
        changes["n_elements"] = 0
    return with_overrides(cfg, **changes) if changes else cfg


def run_scheme(scheme: str, cfg: ScenarioConfig, seed: int | None = None,
               opts: AOOptions | None = None):
    """All slot solutions of one scheme run. random-phase keeps the
    seeded phase draw fixed; the other schemes share the full loop."""
    run_cfg = scheme_config(scheme, cfg, seed)
    return solve_scenario(run_cfg, opts=opts,
                          update_phases=(scheme != "random-phase"))


def run_cell(scheme: str, base_cfg: ScenarioConfig, parameter: str,
             value, seed: int, opts: AOOptions | None = None) -> RunRow:
    """One sweep cell: scheme at one grid value and one seed, averaged
    over slots. Infeasible runs are recorded, not raised."""
    start = time.perf_counter()
    cfg = with_overrides(base_cfg, **{parameter: value})
    try:
        sols = run_scheme(scheme, cfg, seed=seed, opts=opts)
        snr_lin = float(np.mean([s.radar_snr_lin for s in sols]))
        row = RunRow(
            scheme=scheme, param=parameter, param_value=value, seed=seed,
            sum_rate_bps_hz=float(np.mean([s.sum_rate for s in sols])),
            radar_snr_db=lin_to_db(snr_lin),
            power_w=float(np.mean([s.power_w for s in sols])),
            iterations=float(np.mean([s.iterations for s in sols])),
            wall_ms=(time.perf_counter() - start) * 1e3,
            status="ok",
        )
    except InfeasibleError:
        row = RunRow(
            scheme=scheme, param=parameter, param_value=value, seed=seed,
            sum_rate_bps_hz=math.nan, radar_snr_db=math.nan,
            power_w=math.nan, iterations=math.nan,
            wall_ms=(time.perf_counter() - start) * 1e3,
            status="infeasible",
        )
    return row


def _run_cell_task(task):
    scheme, base_cfg, parameter, value, seed, opts = task
    return run_cell(scheme, base_cfg, parameter, value, seed, opts=opts)


def run_sweep(spec: SweepSpec, base_cfg: ScenarioConfig,
              opts: AOOptions | None = None, jobs: int = 1) -> list:
    """Evaluate every (scheme, value, seed) cell. Row order is fixed by
    the SweepSpec, never by completion time, so output is identical for
    any worker count."""
    tasks = [(scheme, base_cfg, spec.parameter, value, seed, opts)
             for scheme in spec.schemes
             for value in spec.grid
             for seed in spec.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell_task, tasks))
    return [_run_cell_task(t) for t in tasks]


def summarize(rows) -> list:
    """Seed statistics per (scheme, param, value): mean and standard
    error (sample stddev over sqrt of count) of the sum rate, mean radar
    SNR, with infeasible seeds excluded from means but counted."""
    if not rows:
        raise ValueError("no rows to summarize")
    groups: dict = {}
    order = []
    for row in rows:
        key = (row.scheme, row.param, row.param_value)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        members = groups[key]
        ok = [r for r in members if r.status == "ok"]
        rates = np.array([r.sum_rate_bps_hz for r in ok])
        if rates.size:
            mean = float(rates.mean())
            stderr = (float(rates.std(ddof=1)) / math.sqrt(rates.size)
                      if rates.size > 1 else 0.0)
            snr_mean = float(np.mean([r.radar_snr_db for r in ok]))
        else:
            mean = stderr = snr_mean = math.nan
        out.append(SummaryRow(
            scheme=key[0], param=key[1], param_value=key[2],
            n_ok=len(ok), n_infeasible=len(members) - len(ok),
            sum_rate_mean=mean, sum_rate_stderr=stderr,
            radar_snr_db_mean=snr_mean,
        ))
    return out


def _num(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def rows_to_csv_text(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_num(getattr(r, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def summary_to_csv_text(srows) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for r in srows:
        lines.append(",".join(_num(getattr(r, col)) for col in SUMMARY_COLUMNS))
    return "\n".join(lines) + "\n"


def write_csv(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
