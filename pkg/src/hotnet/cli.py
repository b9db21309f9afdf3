"""Scenario/sweep runner: flat key=value configs in, CSV tables out.

The config mirrors the parameter record field-for-field (``lambda1_per_km2
= 30``, ``sigma_bs_m = 100`` ...) plus a sweep block (``scenario``,
``sweep_variable``, ``sweep_grid``, ``metrics``, ``tau_db``).  Each
requested metric becomes one CSV with a row per grid point; ``both`` mode
adds an |mc - analytic| column.  Values are printed with 9 significant
digits and LF endings so fixture files can be compared byte-for-byte.
When matplotlib is importable, each CSV is also rendered to a PNG next to
it (disable with --no-figures).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import analytic, montecarlo
from .params import ScenarioKind, SystemParams
from .quadrature import QuadSpec, find_root_monotone

SWEEP_VARIABLES = ("n_bs", "eta", "bias_ratio_db", "v0", "tau_db")
METRICS = ("assoc_prob", "coverage", "snr_coverage", "edge_sinr",
           "median_sinr", "edge_rate", "median_rate",
           "mean_serving_distance", "avg_rate")
_CURVE_GRID_DB = np.arange(-40.0, 60.0 + 0.5, 1.0)
# analytic root-finds run on a loosened tolerance; sweeps stay tractable
_SWEEP_SPEC = QuadSpec(rel_tol=3e-3, abs_tol=1e-6)


class ConfigError(Exception):
    pass


@dataclass
class SweepSpec:
    scenario: ScenarioKind
    variable: str
    grid: list
    metrics: list
    tau_db: float = 0.0

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep_variable {self.variable!r}; "
                              f"choose from {', '.join(SWEEP_VARIABLES)}")
        if not self.grid:
            raise ConfigError("sweep_grid must not be empty")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise ConfigError(f"unknown metrics: {', '.join(bad)}")
        if not self.metrics:
            raise ConfigError("metrics must not be empty")


@dataclass
class RunConfig:
    params: SystemParams
    sweep: SweepSpec
    warnings: list


_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SystemParams)}
_SWEEP_KEYS = ("scenario", "sweep_variable", "sweep_grid", "metrics",
               "tau_db")


def parse_config(path) -> RunConfig:
    """Parse and validate a flat key=value config file."""
    text = Path(path).read_text()
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', "
                              f"got {stripped!r}")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if key not in _PARAM_FIELDS and key not in _SWEEP_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value

    warnings = []
    kwargs = {}
    for name, fld in _PARAM_FIELDS.items():
        if name not in raw:
            continue
        caster = int if fld.type == "int" else float
        try:
            kwargs[name] = caster(raw.pop(name))
        except ValueError as exc:
            raise ConfigError(f"{path}: bad value for {name}: {exc}") from None
    if "bias2_db" not in kwargs:
        warnings.append("bias2_db not set; defaulting to 0 dB")
    try:
        params = SystemParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    try:
        scenario = ScenarioKind(raw.pop("scenario", "a"))
    except ValueError:
        raise ConfigError(f"{path}: scenario must be one of a, b, c, d") from None
    variable = raw.pop("sweep_variable", "tau_db")
    grid_text = raw.pop("sweep_grid", "")
    try:
        grid = [float(tok) for tok in grid_text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"{path}: bad sweep_grid: {exc}") from None
    if variable == "n_bs":
        grid = [int(g) for g in grid]
    metrics = [tok for tok in raw.pop("metrics", "coverage")
               .replace(",", " ").split()]
    tau_db = float(raw.pop("tau_db", "0"))
    sweep = SweepSpec(scenario, variable, grid, metrics, tau_db)
    return RunConfig(params, sweep, warnings)


def _params_at(base: SystemParams, sweep: SweepSpec, value) -> SystemParams:
    if sweep.variable == "n_bs":
        return base.replace(n_bs=int(value))
    if sweep.variable == "eta":
        return base.replace(sigma_bs_m=float(value) * base.sigma_ue_m)
    if sweep.variable == "bias_ratio_db":
        return base.replace(bias2_db=float(value), bias1_db=0.0)
    return base  # v0 / tau_db sweeps evaluate at fixed params


def _analytic_coverage(tau: float, params: SystemParams,
                       scenario: ScenarioKind,
                       spec: QuadSpec = _SWEEP_SPEC) -> float:
    if scenario is ScenarioKind.SUB6_ONLY:
        return analytic.coverage(tau, params.replace(n_bs=0), spec=spec)
    if scenario is ScenarioKind.MMWAVE_ONLY:
        return analytic.coverage(tau, params.replace(lambda1_per_km2=0.0),
                                 spec=spec)
    if scenario is ScenarioKind.TWO_TIER_SUB6:
        return analytic.coverage_two_tier_sub6(tau, params, spec=spec)
    return analytic.coverage(tau, params, spec=spec)


def _analytic_percentile(params: SystemParams, scenario: ScenarioKind,
                         target: float) -> float:
    try:
        return find_root_monotone(
            lambda t_db: _analytic_coverage(10.0 ** (t_db / 10.0), params,
                                            scenario),
            target, (-40.0, 60.0), tol=0.05)
    except ValueError:
        return math.nan


def _analytic_metric(metric: str, params: SystemParams,
                     sweep: SweepSpec, value) -> float:
    scenario = sweep.scenario
    if sweep.variable == "v0":
        v0 = float(value)
        if metric == "assoc_prob":
            if scenario is ScenarioKind.TWO_TIER_SUB6:
                return analytic.assoc_prob_two_tier_sub6(2, v0, params)
            return analytic.conditional_assoc_prob(2, v0, params)
        return math.nan
    tau = 10.0 ** ((float(value) if sweep.variable == "tau_db"
                    else sweep.tau_db) / 10.0)
    if metric == "assoc_prob":
        if scenario is ScenarioKind.TWO_TIER_SUB6:
            return math.nan
        return analytic.assoc_prob(2, params)
    if metric == "coverage":
        return _analytic_coverage(tau, params, scenario)
    if metric == "median_sinr":
        return _analytic_percentile(params, scenario, 0.5)
    if metric == "edge_sinr":
        return _analytic_percentile(params, scenario, 0.95)
    if metric == "avg_rate":
        if scenario is ScenarioKind.INTEGRATED:
            return analytic.avg_rate(params)
        return math.nan
    return math.nan  # snr_coverage / rate percentiles / distances: MC side


def _mc_metric(metric: str, table: montecarlo.TrialTable,
               params: SystemParams, sweep: SweepSpec, value,
               v0_sel: Optional[np.ndarray] = None):
    """Returns (value, stderr) from a trial table."""
    if v0_sel is not None:
        table = montecarlo.TrialTable(
            table.tier[v0_sel], table.serving_distance[v0_sel],
            table.v0[v0_sel], table.sinr[v0_sel], table.snr[v0_sel],
            table.rate[v0_sel])
        if len(table) == 0:
            return math.nan, math.nan
    if metric == "assoc_prob":
        est = montecarlo.estimate_assoc_prob(table, 2)
        return est.value, est.stderr
    if metric == "mean_serving_distance":
        served = table.served
        if not served.any():
            return math.nan, math.nan
        d = table.serving_distance[served]
        return float(np.mean(d)), float(np.std(d, ddof=1) / math.sqrt(len(d)))
    if metric == "avg_rate":
        est = montecarlo.estimate_rate(table)
        return est.value, est.stderr
    tau_db = float(value) if sweep.variable == "tau_db" else sweep.tau_db
    if metric in ("coverage", "snr_coverage"):
        which = "sinr" if metric == "coverage" else "snr"
        curve = montecarlo.estimate_coverage(table, [tau_db], metric=which)
        return float(curve.probabilities[0]), float(curve.stderr[0])
    if metric in ("median_sinr", "edge_sinr"):
        curve = montecarlo.estimate_coverage(table, _CURVE_GRID_DB)
        target = 50.0 if metric == "median_sinr" else 5.0
        try:
            return montecarlo.percentile_metric(curve, target), math.nan
        except ValueError:
            return math.nan, math.nan
    if metric in ("median_rate", "edge_rate"):
        rates = np.where(table.served, table.rate, 0.0)
        q = 0.5 if metric == "median_rate" else 0.05
        return float(np.quantile(rates, q)), math.nan
    return math.nan, math.nan


def _assoc_only_sufficient(metrics) -> bool:
    return set(metrics) <= {"assoc_prob", "mean_serving_distance"}


def _eval_point(job) -> dict:
    """One grid point: returns a row per metric (worker-pool entry)."""
    (index, value, base, sweep, mode, seed, trials) = job
    params = _params_at(base, sweep, value)
    row: dict[str, dict] = {}
    table = None
    v0_sel = None
    if mode in ("mc", "both"):
        assoc_only = _assoc_only_sufficient(sweep.metrics)
        table = montecarlo.run_trials(params, sweep.scenario, trials, seed,
                                      assoc_only=assoc_only)
        if sweep.variable == "v0":
            # bin half-width: a tenth of sigma_UE around the grid point
            half = 0.1 * params.sigma_ue_m
            v0_sel = np.abs(table.v0 - float(value)) < half
    for metric in sweep.metrics:
        cell = {"grid": value}
        if table is not None:
            v, se = _mc_metric(metric, table, params, sweep, value, v0_sel)
            cell["mc"] = v
            cell["mc_stderr"] = se
        if mode in ("analytic", "both"):
            cell["analytic"] = _analytic_metric(metric, params, sweep, value)
        if mode == "both":
            a, m = cell.get("analytic"), cell.get("mc")
            cell["abs_diff"] = (abs(a - m)
                                if a == a and m == m else math.nan)
        row[metric] = cell
    return {"index": index, "cells": row}


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.9g}"
    return str(x)


def _write_csv(out_dir: Path, sweep: SweepSpec, mode: str,
               rows: list[dict]) -> list[Path]:
    paths = []
    columns = ["grid"]
    if mode in ("mc", "both"):
        columns += ["mc", "mc_stderr"]
    if mode in ("analytic", "both"):
        columns += ["analytic"]
    if mode == "both":
        columns += ["abs_diff"]
    for metric in sweep.metrics:
        path = out_dir / f"{metric}.csv"
        header = [sweep.variable] + columns[1:]
        lines = [",".join(header)]
        for row in sorted(rows, key=lambda r: r["index"]):
            cell = row["cells"][metric]
            lines.append(",".join(_fmt(cell.get(c, math.nan))
                                  for c in columns))
        path.write_text("\n".join(lines) + "\n", newline="\n")
        paths.append(path)
    return paths


def _render_figures(paths: list[Path], sweep: SweepSpec) -> None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    for path in paths:
        data = np.genfromtxt(path, delimiter=",", names=True)
        if data.size == 0:
            continue
        names = data.dtype.names
        fig, ax = plt.subplots(figsize=(5, 3.5))
        x = np.atleast_1d(data[names[0]])
        if "mc" in names:
            err = np.atleast_1d(data["mc_stderr"]) if "mc_stderr" in names else None
            ax.errorbar(x, np.atleast_1d(data["mc"]), yerr=err, fmt="o",
                        ms=3, label="simulation")
        if "analytic" in names:
            ax.plot(x, np.atleast_1d(data["analytic"]), "-", label="analysis")
        ax.set_xlabel(sweep.variable)
        ax.set_ylabel(path.stem)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=150)
        plt.close(fig)


def _write_manifest(out_dir: Path, cfg: RunConfig, mode: str, seed: int,
                    trials: int) -> None:
    import scipy

    from . import __version__
    lines = [f"mode = {mode}", f"seed = {seed}", f"trials = {trials}",
             f"scenario = {cfg.sweep.scenario.value}",
             f"sweep_variable = {cfg.sweep.variable}",
             f"sweep_grid = {' '.join(_fmt(g) for g in cfg.sweep.grid)}",
             f"metrics = {' '.join(cfg.sweep.metrics)}",
             f"hotnet_version = {__version__}",
             f"numpy_version = {np.__version__}",
             f"scipy_version = {scipy.__version__}"]
    for key, val in cfg.params.as_dict().items():
        lines.append(f"{key} = {_fmt(val)}")
    (out_dir / "run_manifest.txt").write_text("\n".join(lines) + "\n",
                                              newline="\n")


def cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(i, v, cfg.params, cfg.sweep, args.mode, args.seed, args.trials)
            for i, v in enumerate(cfg.sweep.grid)]
    workers = int(os.environ.get("HOTNET_WORKERS", "1"))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_point, jobs))
    else:
        rows = [_eval_point(j) for j in jobs]

    paths = _write_csv(out_dir, cfg.sweep, args.mode, rows)
    _write_manifest(out_dir, cfg, args.mode, args.seed, args.trials)
    if not args.no_figures:
        _render_figures(paths, cfg.sweep)

    nan_cells = sum(
        1 for row in rows for cell in row["cells"].values()
        for key in ("mc", "analytic")
        if key in cell and isinstance(cell[key], float)
        and math.isnan(cell[key]))
    if nan_cells:
        print(f"warning: {nan_cells} metric cells could not be evaluated",
              file=sys.stderr)
        if args.strict:
            return 1
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = parse_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for w in cfg.warnings:
        print(f"warning: {w}")
    print(f"scenario = {cfg.sweep.scenario.value}")
    print(f"sweep_variable = {cfg.sweep.variable}")
    print(f"sweep_grid = {' '.join(_fmt(g) for g in cfg.sweep.grid)}")
    print(f"metrics = {' '.join(cfg.sweep.metrics)}")
    for key, val in cfg.params.as_dict().items():
        print(f"{key} = {_fmt(val)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hotnet",
        description="Coverage/association/rate evaluation of a clustered "
                    "Sub-6GHz/mmWave network, by simulation and by "
                    "closed-form evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a sweep and emit CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--mode", choices=("mc", "analytic", "both"),
                       default="both")
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=1)
    p_run.add_argument("--trials", type=int, default=100_000)
    p_run.add_argument("--strict", action="store_true",
                       help="nonzero exit when any metric cell fails")
    p_run.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering next to the CSVs")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="parse a config and echo the "
                                            "resolved parameters")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
