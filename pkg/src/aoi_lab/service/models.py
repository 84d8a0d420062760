"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..experiments import MODES


class AnalyticRequest(BaseModel):
    n_ues: int = Field(ge=1)
    gen_rate: float = Field(gt=0)
    bits: float = Field(gt=0)
    coding_rate: float = Field(gt=0)
    snr: float = Field(default=1.0, gt=0)
    overhead: float = Field(default=0.0, ge=0)
    alpha: float = Field(default=1.0, gt=0)
    strategies: list[str] = ["DNP"]


class StrategyAoi(BaseModel):
    strategy: str
    mean_aoi: float | None   # None encodes a divergent (infinite) mean age
    divergent: bool


class AnalyticResponse(BaseModel):
    results: list[StrategyAoi]


class SimulateRequest(AnalyticRequest):
    horizon: float = Field(default=2e6, gt=0)
    replications: int = Field(default=20, ge=2)
    seed: int = Field(default=0, ge=0)


class SimulatedAoi(BaseModel):
    strategy: str
    sim_mean: float
    ci_half_width: float
    replications: int
    per_ue: list[tuple[float, float]]  # (mean, ci_half_width) per UE


class SimulateResponse(BaseModel):
    results: list[SimulatedAoi]


class AlphaThresholdRequest(BaseModel):
    n_ues: int = Field(ge=1)
    gen_rate: float = Field(gt=0)
    cycle: float = Field(gt=0)
    tx_ratio: float = Field(gt=0, le=1)


class ThresholdResponse(BaseModel):
    value: float | None      # None encodes "no finite crossing"
    dominance: str | None
    extra_roots: list[float] = []


class AlphaThresholdResponse(ThresholdResponse):
    limit_zero_waiting: float
    limit_sporadic: float


class DynamicSystem(BaseModel):
    inner_radius: float = Field(default=1.0, ge=1)
    outer_radius: float = Field(gt=1)
    pathloss_exp: float = Field(ge=2)
    ref_snr: float | None = Field(default=None, gt=0)
    edge_snr: float | None = Field(default=None, gt=0)
    ue_intensity: float | None = Field(default=None, gt=0)
    mean_ue_count: float | None = Field(default=None, gt=0)
    overhead: float = Field(default=0.0, ge=0)
    common_bits: float = Field(default=0.0, ge=0)
    individual_bits: float = Field(default=0.0, ge=0)


class BetaThresholdResponse(ThresholdResponse):
    large_cell_approx: float


class DynamicRequest(DynamicSystem):
    scheme: str = "broadcast"
    realizations: int = Field(default=10000, ge=100)
    seed: int = Field(default=0, ge=0)
    rate_backoff: float | None = Field(default=None, gt=0, lt=1)


class DynamicResponse(BaseModel):
    scheme: str
    mc_mean: float
    ci_half_width: float
    closed_form: float


class ExperimentRequest(BaseModel):
    mode: str
    params: dict = {}
    sweep: dict = {}
    seed: int = 0
    replications: int | None = None
    horizon: float | None = None

    def modes(self) -> tuple:
        return MODES


class ExperimentResponse(BaseModel):
    rows: list[dict]
    status: int
