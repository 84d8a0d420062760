"""Experiment driver: parse a YAML-style config dict, run a mode, emit rows.

Modes
-----
analytic        closed-form mean age over a parameter sweep
simulate        discrete-event estimate with confidence interval
compare         analytic vs simulated, flagging CI containment
alpha-threshold information-ratio threshold for the remote-control system
beta-threshold  payload-split threshold for the dynamic system
dynamic         Monte-Carlo expected age of the dynamic system

Every mode produces a list of dict rows with a fixed column order so that
CSV output is deterministic for a given config and seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from . import analytic, dynamic, selector, sim
from .analytic import Strategy, SystemConfig

MODES = ("analytic", "simulate", "compare",
         "alpha-threshold", "beta-threshold", "dynamic")

# exit-code semantics for the CLI: 0 ok, 1 comparison failed, 2 bad input
STATUS_OK = 0
STATUS_MISMATCH = 1
STATUS_INVALID = 2


class ConfigError(ValueError):
    """Raised for malformed or incomplete experiment configs."""


@dataclass
class ExperimentSpec:
    mode: str
    params: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)   # name -> list of values
    seed: int = 0
    replications: int | None = None
    horizon: float | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentSpec":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        mode = raw.get("mode")
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        sweep = raw.get("sweep") or {}
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must be a mapping of name -> values")
        for name, values in sweep.items():
            if not isinstance(values, (list, tuple)) or not values:
                raise ConfigError(f"sweep.{name} must be a non-empty list")
        params = raw.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("params must be a mapping")
        return cls(mode=mode, params=dict(params), sweep=dict(sweep),
                   seed=int(raw.get("seed", 0)),
                   replications=raw.get("replications"),
                   horizon=raw.get("horizon"))

    def sweep_points(self):
        """Yield param dicts: base params overlaid with each sweep combo."""
        if not self.sweep:
            yield dict(self.params)
            return
        names = sorted(self.sweep)
        def rec(i, acc):
            if i == len(names):
                merged = dict(self.params)
                merged.update(acc)
                yield merged
                return
            for v in self.sweep[names[i]]:
                acc[names[i]] = v
                yield from rec(i + 1, acc)
        yield from rec(0, {})


def _require(params: dict, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigError(f"missing required parameter(s): {', '.join(missing)}")


def _system_config(params: dict) -> SystemConfig:
    _require(params, "n_ues", "gen_rate", "bits", "coding_rate")
    return SystemConfig.homogeneous(
        n_ues=int(params["n_ues"]),
        bits=float(params["bits"]),
        snr=float(params.get("snr", params.get("gamma", 1.0))),
        gen_rate=float(params["gen_rate"]),
        coding_rate=float(params["coding_rate"]),
        overhead=float(params.get("overhead", 0.0)),
        alpha=float(params.get("alpha", 1.0)),
    )


def _strategies(params: dict):
    names = params.get("strategies") or params.get("strategy") or "DNP"
    if isinstance(names, str):
        names = [names]
    try:
        return [Strategy(name) for name in names]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _point_columns(point: dict) -> dict:
    out = {}
    for key, val in sorted(point.items()):
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            out[key] = val
    return out


def _flag_short_blocklength(row: dict, cfg: SystemConfig) -> None:
    # the error-rate approximation is only tight from ~100 channel uses up
    row["short_blocklength"] = any(m < 100 for m in cfg.per_ue_blocklength)


def run_analytic(spec: ExperimentSpec):
    rows = []
    for point in spec.sweep_points():
        cfg = _system_config(point)
        for strat in _strategies(point):
            try:
                mean = analytic.system_average(cfg, strat)
                divergent = not math.isfinite(mean)
            except analytic.DivergentAoiError:
                mean, divergent = math.inf, True
            row = _point_columns(point)
            row.update(strategy=strat.value, mean_aoi=mean, divergent=divergent)
            _flag_short_blocklength(row, cfg)
            rows.append(row)
    return rows, STATUS_OK


def _sim_run(spec: ExperimentSpec, cfg, strat) -> sim.SimRun:
    kwargs = {}
    if spec.horizon is not None:
        kwargs["horizon"] = float(spec.horizon)
    if spec.replications is not None:
        kwargs["replications"] = int(spec.replications)
    return sim.SimRun(cfg=cfg, strategy=strat, seed=spec.seed, **kwargs)


def run_simulate(spec: ExperimentSpec):
    rows = []
    for point in spec.sweep_points():
        cfg = _system_config(point)
        for strat in _strategies(point):
            if strat not in sim.SIMULATABLE:
                raise ConfigError(f"strategy {strat.value} is not simulatable")
            est = sim.simulate(_sim_run(spec, cfg, strat))
            row = _point_columns(point)
            row.update(strategy=strat.value, sim_mean=est.mean,
                       ci_half_width=est.ci_half_width,
                       replications=est.replications)
            _flag_short_blocklength(row, cfg)
            rows.append(row)
    return rows, STATUS_OK


def run_compare(spec: ExperimentSpec):
    rows = []
    status = STATUS_OK
    for point in spec.sweep_points():
        cfg = _system_config(point)
        for strat in _strategies(point):
            if strat not in sim.SIMULATABLE:
                raise ConfigError(f"strategy {strat.value} is not simulatable")
            mean = analytic.system_average(cfg, strat)
            est = sim.simulate(_sim_run(spec, cfg, strat))
            contained = (math.isfinite(mean)
                         and abs(est.mean - mean) <= est.ci_half_width)
            if not contained:
                status = STATUS_MISMATCH
            row = _point_columns(point)
            row.update(strategy=strat.value, analytic_mean=mean,
                       sim_mean=est.mean, ci_half_width=est.ci_half_width,
                       contained=contained)
            rows.append(row)
    return rows, status


def run_alpha_threshold(spec: ExperimentSpec):
    rows = []
    for point in spec.sweep_points():
        _require(point, "n_ues", "gen_rate", "cycle", "tx_ratio")
        sc = selector.RemoteControlScenario(
            n_ues=int(point["n_ues"]), gen_rate=float(point["gen_rate"]),
            cycle=float(point["cycle"]), tx_ratio=float(point["tx_ratio"]))
        res = selector.alpha_threshold(sc)
        lim_fast, lim_slow = selector.alpha_threshold_limits(sc)
        row = _point_columns(point)
        row.update(alpha_threshold=res.value,
                   dominance=res.dominance or "",
                   limit_zero_waiting=lim_fast, limit_sporadic=lim_slow)
        rows.append(row)
    return rows, STATUS_OK


def _dynamic_config(point: dict) -> dynamic.DynamicConfig:
    _require(point, "outer_radius", "pathloss_exp")
    kwargs = dict(
        inner_radius=float(point.get("inner_radius", 1.0)),
        outer_radius=float(point["outer_radius"]),
        pathloss_exp=float(point["pathloss_exp"]),
        overhead=float(point.get("overhead", 0.0)),
        common_bits=float(point.get("common_bits", 0.0)),
        individual_bits=float(point.get("individual_bits", 0.0)),
    )
    if "edge_snr" in point:
        kwargs["ref_snr"] = (float(point["edge_snr"])
                             * kwargs["outer_radius"] ** kwargs["pathloss_exp"])
    elif "ref_snr" in point:
        kwargs["ref_snr"] = float(point["ref_snr"])
    else:
        raise ConfigError("need edge_snr or ref_snr")
    if "mean_ue_count" in point:
        return dynamic.DynamicConfig.with_mean_ue_count(
            float(point["mean_ue_count"]), **kwargs)
    if "ue_intensity" in point:
        return dynamic.DynamicConfig(ue_intensity=float(point["ue_intensity"]),
                                     **kwargs)
    raise ConfigError("need mean_ue_count or ue_intensity")


def run_beta_threshold(spec: ExperimentSpec):
    rows = []
    for point in spec.sweep_points():
        cfg = _dynamic_config(point)
        res = selector.beta_threshold(cfg)
        row = _point_columns(point)
        row.update(beta_threshold=res.value,
                   dominance=res.dominance or "",
                   large_cell_approx=selector.beta_threshold_large_cell(cfg))
        rows.append(row)
    return rows, STATUS_OK


def run_dynamic(spec: ExperimentSpec):
    rows = []
    for point in spec.sweep_points():
        cfg = _dynamic_config(point)
        schemes = point.get("schemes") or [point.get("scheme", "broadcast")]
        if isinstance(schemes, str):
            schemes = [schemes]
        realizations = int(point.get("realizations", 10000))
        for scheme in schemes:
            if scheme not in ("broadcast", "unicast"):
                raise ConfigError(f"unknown scheme {scheme!r}")
            est = dynamic.expected_aoi_monte_carlo(
                cfg, scheme, realizations=realizations, seed=spec.seed,
                rate_backoff=point.get("rate_backoff"))
            closed = (selector.expected_aoi_broadcast(cfg) if scheme == "broadcast"
                      else selector.expected_aoi_unicast(cfg))
            row = _point_columns(point)
            row.update(scheme=scheme, mc_mean=est.mean,
                       ci_half_width=est.ci_half_width, closed_form=closed)
            rows.append(row)
    return rows, STATUS_OK


_RUNNERS = {
    "analytic": run_analytic,
    "simulate": run_simulate,
    "compare": run_compare,
    "alpha-threshold": run_alpha_threshold,
    "beta-threshold": run_beta_threshold,
    "dynamic": run_dynamic,
}


def run_experiment(spec: ExperimentSpec):
    """Run one experiment; returns (rows, status)."""
    return _RUNNERS[spec.mode](spec)


def write_csv(rows, path) -> None:
    """Write rows to CSV with a stable union-of-keys header."""
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
