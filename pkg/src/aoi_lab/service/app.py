"""FastAPI service exposing the age-of-information toolkit.

The CLI talks to this app in-process by default, so everything the command
line can do is also reachable over HTTP.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException

from .. import analytic, dynamic, experiments, selector, sim
from ..analytic import DivergentAoiError, Strategy, SystemConfig
from . import models


def _system_config(req) -> SystemConfig:
    return SystemConfig.homogeneous(
        n_ues=req.n_ues, bits=req.bits, snr=req.snr, gen_rate=req.gen_rate,
        coding_rate=req.coding_rate, overhead=req.overhead, alpha=req.alpha)


def _strategies(names):
    try:
        return [Strategy(name) for name in names]
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _dynamic_config(req: models.DynamicSystem) -> dynamic.DynamicConfig:
    point = req.model_dump(exclude_none=True)
    point.pop("scheme", None)
    point.pop("realizations", None)
    point.pop("seed", None)
    point.pop("rate_backoff", None)
    try:
        return experiments._dynamic_config(point)
    except (experiments.ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def create_app() -> FastAPI:
    app = FastAPI(title="aoi-lab", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/analytic", response_model=models.AnalyticResponse)
    def analytic_endpoint(req: models.AnalyticRequest):
        cfg = _system_config(req)
        results = []
        for strat in _strategies(req.strategies):
            try:
                mean = analytic.system_average(cfg, strat)
            except DivergentAoiError:
                mean = math.inf
            results.append(models.StrategyAoi(
                strategy=strat.value,
                mean_aoi=mean if math.isfinite(mean) else None,
                divergent=not math.isfinite(mean)))
        return models.AnalyticResponse(results=results)

    @app.post("/api/simulate", response_model=models.SimulateResponse)
    def simulate_endpoint(req: models.SimulateRequest):
        cfg = _system_config(req)
        results = []
        for strat in _strategies(req.strategies):
            if strat not in sim.SIMULATABLE:
                raise HTTPException(status_code=422,
                                    detail=f"strategy {strat.value} is not simulatable")
            try:
                run = sim.SimRun(cfg=cfg, strategy=strat, horizon=req.horizon,
                                 replications=req.replications, seed=req.seed)
                est = sim.simulate(run)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from None
            results.append(models.SimulatedAoi(
                strategy=strat.value, sim_mean=est.mean,
                ci_half_width=est.ci_half_width,
                replications=est.replications, per_ue=list(est.per_ue)))
        return models.SimulateResponse(results=results)

    @app.post("/api/alpha-threshold", response_model=models.AlphaThresholdResponse)
    def alpha_endpoint(req: models.AlphaThresholdRequest):
        sc = selector.RemoteControlScenario(
            n_ues=req.n_ues, gen_rate=req.gen_rate,
            cycle=req.cycle, tx_ratio=req.tx_ratio)
        res = selector.alpha_threshold(sc)
        lim_fast, lim_slow = selector.alpha_threshold_limits(sc)
        return models.AlphaThresholdResponse(
            value=res.value, dominance=res.dominance,
            extra_roots=list(res.extra_roots),
            limit_zero_waiting=lim_fast, limit_sporadic=lim_slow)

    @app.post("/api/beta-threshold", response_model=models.BetaThresholdResponse)
    def beta_endpoint(req: models.DynamicSystem):
        cfg = _dynamic_config(req)
        try:
            res = selector.beta_threshold(cfg)
            approx = selector.beta_threshold_large_cell(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return models.BetaThresholdResponse(
            value=res.value if math.isfinite(res.value) else None,
            dominance=res.dominance, large_cell_approx=approx)

    @app.post("/api/dynamic", response_model=models.DynamicResponse)
    def dynamic_endpoint(req: models.DynamicRequest):
        if req.scheme not in ("broadcast", "unicast"):
            raise HTTPException(status_code=422,
                                detail=f"unknown scheme {req.scheme!r}")
        cfg = _dynamic_config(req)
        try:
            est = dynamic.expected_aoi_monte_carlo(
                cfg, req.scheme, realizations=req.realizations,
                seed=req.seed, rate_backoff=req.rate_backoff)
            closed = (selector.expected_aoi_broadcast(cfg)
                      if req.scheme == "broadcast"
                      else selector.expected_aoi_unicast(cfg))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return models.DynamicResponse(scheme=req.scheme, mc_mean=est.mean,
                                      ci_half_width=est.ci_half_width,
                                      closed_form=closed)

    @app.post("/api/experiment", response_model=models.ExperimentResponse)
    def experiment_endpoint(req: models.ExperimentRequest):
        try:
            spec = experiments.ExperimentSpec.from_dict(req.model_dump())
            rows, status = experiments.run_experiment(spec)
        except (experiments.ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        clean = [{k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                  for k, v in row.items()} for row in rows]
        return models.ExperimentResponse(rows=clean, status=status)

    return app


app = create_app()
