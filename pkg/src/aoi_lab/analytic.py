"""Closed-form average age of information for downlink status updates.

A base station generates updates as a Poisson process and pushes them to N
user equipments, either as one joint broadcast packet or as per-UE unicast
packets served round-robin.  Five packet-management strategies are covered:

* BRNP / BRPS - broadcast, non-preemptive / preempt-in-serving
* DNP / DPB / DPS - unicast, non-preemptive / preempt-in-buffer /
  preempt-in-serving

plus the zero-waiting (saturated generation) limits of DNP and DPB.  All
times are in channel uses; UE indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import fbl

#: Error rates at or above this are treated as divergent: the geometric
#: retry factor (1+eps)/(1-eps) would exceed ~2e12 and the mean age with it.
DIVERGENCE_EPS = 1.0 - 1e-12

#: Exponent cap: beyond this exp() overflows and the preemptive strategies'
#: mean age is effectively infinite anyway.
_EXP_CAP = 700.0


class Strategy(str, Enum):
    BRNP = "BRNP"
    BRPS = "BRPS"
    DNP = "DNP"
    DPB = "DPB"
    DPS = "DPS"
    DNPZ = "DNPZ"  # zero-waiting analytic variant of DNP
    DPBZ = "DPBZ"  # zero-waiting analytic variant of DPB

    @property
    def is_broadcast(self) -> bool:
        return self in (Strategy.BRNP, Strategy.BRPS)

    @property
    def is_zero_wait(self) -> bool:
        return self in (Strategy.DNPZ, Strategy.DPBZ)


SIMULATABLE = (Strategy.BRNP, Strategy.BRPS, Strategy.DNP, Strategy.DPB, Strategy.DPS)


class DivergentAoiError(ValueError):
    """The block error rate is too close to 1 for a finite mean age."""


@dataclass(frozen=True)
class SystemConfig:
    """One BS -> N-UE downlink scenario.

    ``per_ue_*`` lists are indexed by UE.  ``overhead`` is the per-UE
    pre-processing time added to every unicast transmission; broadcast
    packets carry no overhead.  ``broadcast_bits``/``broadcast_blocklength``
    describe the jointly encoded packet used by BRNP/BRPS.
    """

    n_ues: int
    gen_rate: float
    per_ue_bits: tuple
    per_ue_blocklength: tuple
    per_ue_snr: tuple
    overhead: float = 0.0
    broadcast_bits: float | None = None
    broadcast_blocklength: float | None = None

    def __post_init__(self):
        if self.n_ues < 1:
            raise ValueError("n_ues must be >= 1")
        if not self.gen_rate > 0:
            raise ValueError("gen_rate must be positive")
        if self.overhead < 0:
            raise ValueError("overhead must be >= 0")
        for name in ("per_ue_bits", "per_ue_blocklength", "per_ue_snr"):
            vals = getattr(self, name)
            if len(vals) != self.n_ues:
                raise ValueError(f"{name} must have length n_ues={self.n_ues}")
            if any(not v > 0 for v in vals):
                raise ValueError(f"{name} entries must be positive")
        if self.broadcast_bits is not None:
            alpha = self.info_ratio
            if not 0 < alpha <= 1 + 1e-12:
                raise ValueError("information ratio must lie in (0, 1]")

    @classmethod
    def homogeneous(cls, n_ues, bits, snr, gen_rate, coding_rate,
                    overhead=0.0, alpha=1.0) -> "SystemConfig":
        """Identical UEs sharing one coding rate for unicast and broadcast."""
        blocklength = bits / coding_rate
        joint_bits = alpha * n_ues * bits
        return cls(
            n_ues=n_ues,
            gen_rate=gen_rate,
            per_ue_bits=(bits,) * n_ues,
            per_ue_blocklength=(blocklength,) * n_ues,
            per_ue_snr=(snr,) * n_ues,
            overhead=overhead,
            broadcast_bits=joint_bits,
            broadcast_blocklength=joint_bits / coding_rate,
        )

    @property
    def serving_times(self) -> tuple:
        """Per-UE serving time: overhead plus transmission blocklength."""
        return tuple(self.overhead + m for m in self.per_ue_blocklength)

    @property
    def cycle_length(self) -> float:
        """Total unicast cycle: sum of all serving times."""
        return sum(self.serving_times)

    @property
    def info_ratio(self) -> float:
        """Joint broadcast payload over summed unicast payloads."""
        if self.broadcast_bits is None:
            raise ValueError("broadcast payload not configured")
        return self.broadcast_bits / sum(self.per_ue_bits)

    def unicast_link(self, ue: int) -> fbl.LinkBudget:
        return fbl.LinkBudget(self.per_ue_snr[ue], self.per_ue_bits[ue],
                              self.per_ue_blocklength[ue])

    def broadcast_link(self, ue: int) -> fbl.LinkBudget:
        if self.broadcast_bits is None:
            raise ValueError("broadcast payload not configured")
        return fbl.LinkBudget(self.per_ue_snr[ue], self.broadcast_bits,
                              self.broadcast_blocklength)

    def error_rate(self, ue: int, strategy: Strategy) -> float:
        link = self.broadcast_link(ue) if strategy.is_broadcast else self.unicast_link(ue)
        return fbl.block_error_rate(link)


@dataclass(frozen=True)
class RenewalDiagnostics:
    """Per-UE renewal quantities behind the mean-age identity.

    mean age = mean_y2 / (2 * mean_y) + mean_t, with mean_t = mean_w + mean_s.
    """

    mean_t: float
    mean_w: float
    mean_s: float
    mean_y: float
    mean_y2: float
    mean_attempts: float

    @property
    def mean_aoi(self) -> float:
        return self.mean_y2 / (2.0 * self.mean_y) + self.mean_t


def _check_eps(eps: float):
    if eps >= DIVERGENCE_EPS:
        raise DivergentAoiError(f"block error rate {eps} gives a divergent mean age")
    if eps < 0:
        raise ValueError("block error rate must be >= 0")


def _resolve_eps(cfg: SystemConfig, ue: int, strategy: Strategy, eps) -> float:
    if eps is None:
        eps = cfg.error_rate(ue, strategy)
    _check_eps(eps)
    return eps


def _cyclic_serving(cfg: SystemConfig, ue: int) -> list:
    # Serving times along the cyclic pass that ends at `ue`:
    # position k (0-based) serves UE (k + ue + 1) mod N, the last one is `ue`.
    s = cfg.serving_times
    n = cfg.n_ues
    return [s[(k + ue + 1) % n] for k in range(n)]


def aoi_dnp(cfg: SystemConfig, ue: int, eps: float | None = None) -> float:
    """Mean age for unicast non-preemptive service, UEs served in fixed order."""
    e = _resolve_eps(cfg, ue, Strategy.DNP, eps)
    lam = cfg.gen_rate
    mt = cfg.cycle_length
    emt = math.exp(-lam * mt)
    retry = (1 + e) / (2 * (1 - e))
    return (
        retry * (mt + emt / lam)
        + (2 * emt - emt * emt) / (2 * (lam * lam * mt + lam * emt))
        - sum(cfg.serving_times[ue + 1:])
        + (1 / lam + mt) * (-math.expm1(-lam * mt))
    )


def aoi_dpb(cfg: SystemConfig, ue: int, eps: float | None = None) -> float:
    """Mean age for unicast with preemption in buffer."""
    e = _resolve_eps(cfg, ue, Strategy.DPB, eps)
    lam = cfg.gen_rate
    mt = cfg.cycle_length
    ms = _cyclic_serving(cfg, ue)
    n = cfg.n_ues
    emt = math.exp(-lam * mt)
    one_minus = -math.expm1(-lam * mt)
    xi = emt / (lam * one_minus) * sum(-math.expm1(-lam * m) for m in ms)
    wait_loss = sum(
        ms[k] * emt * (-math.expm1(-lam * sum(ms[k:n - 1]))) / one_minus
        for k in range(n)
    )
    retry = (1 + e) / (2 * (1 - e))
    return (
        retry * (mt + xi)
        + one_minus / lam
        + (2 * xi - lam * xi * xi) / (2 * lam * (mt + xi))
        - wait_loss
        + ms[n - 1] * one_minus
    )


def aoi_dps(cfg: SystemConfig, ue: int, eps: float | None = None) -> float:
    """Mean age for unicast with preemption in serving (service restarts)."""
    e = _resolve_eps(cfg, ue, Strategy.DPS, eps)
    lam = cfg.gen_rate
    ms = _cyclic_serving(cfg, ue)
    if lam * max(ms) > _EXP_CAP:
        return math.inf  # preemption storm: no packet ever completes
    n = cfg.n_ues
    mt = cfg.cycle_length
    emt = math.exp(-lam * mt)
    one_minus = -math.expm1(-lam * mt)
    q = [math.expm1(lam * m) for m in ms]  # p_k / (1 - p_k)
    psi = emt / one_minus * sum(q)

    first = (1 + e) / (2 * lam * one_minus * (1 - e)) * sum(q)
    system_time = sum(
        ms[k] * (math.exp(-lam * sum(ms[k + 1:])) - emt) / one_minus
        for k in range(n)
    )
    bracket = (2 * psi - psi * psi) / lam**2
    for k in range(n):
        bracket += q[k] * (2 + q[k]) / lam**2 - 2 * ms[k] * math.exp(lam * ms[k]) / lam
    cross = 0.0
    prefix = 0.0
    for k in range(n):
        cross += q[k] * prefix
        prefix += q[k] / lam - ms[k]
    bracket -= 2 * emt / one_minus * cross
    return first + system_time + lam * emt / (2 * psi) * bracket


def aoi_dnp_zero_wait(cfg: SystemConfig, ue: int, eps: float | None = None) -> float:
    """Saturated-generation limit of the DNP mean age."""
    e = _resolve_eps(cfg, ue, Strategy.DNP, eps)
    mt = cfg.cycle_length
    return (1 + e) / (2 * (1 - e)) * mt + mt - sum(cfg.serving_times[ue + 1:])


def aoi_dpb_zero_wait(cfg: SystemConfig, ue: int, eps: float | None = None) -> float:
    """Saturated-generation limit of the DPB mean age."""
    e = _resolve_eps(cfg, ue, Strategy.DPB, eps)
    mt = cfg.cycle_length
    return (1 + e) / (2 * (1 - e)) * mt + cfg.serving_times[ue]


def aoi_brnp(link: fbl.LinkBudget, gen_rate: float, eps: float | None = None) -> float:
    """Mean age for broadcast non-preemptive transmission on one link."""
    if eps is None:
        eps = fbl.block_error_rate(link)
    _check_eps(eps)
    lam = gen_rate
    m = link.blocklength
    em = math.exp(-lam * m)
    return (
        (1 + eps) / (2 * (1 - eps)) * (m + em / lam)
        + (2 * em - em * em) / (2 * (lam * lam * m + lam * em))
        + (1 / lam + m) * (-math.expm1(-lam * m))
    )


def aoi_brps(link: fbl.LinkBudget, gen_rate: float, eps: float | None = None) -> float:
    """Mean age for broadcast with preemption in serving."""
    if eps is None:
        eps = fbl.block_error_rate(link)
    _check_eps(eps)
    lam = gen_rate
    if lam * link.blocklength > _EXP_CAP:
        return math.inf
    return math.exp(lam * link.blocklength) / (lam * (1 - eps))


def aoi(cfg: SystemConfig, strategy: Strategy, ue: int, eps: float | None = None) -> float:
    """Dispatch the closed-form mean age of one UE under any strategy."""
    strategy = Strategy(strategy)
    if strategy.is_broadcast:
        link = cfg.broadcast_link(ue)
        fn = aoi_brnp if strategy is Strategy.BRNP else aoi_brps
        return fn(link, cfg.gen_rate, eps)
    fn = {
        Strategy.DNP: aoi_dnp,
        Strategy.DPB: aoi_dpb,
        Strategy.DPS: aoi_dps,
        Strategy.DNPZ: aoi_dnp_zero_wait,
        Strategy.DPBZ: aoi_dpb_zero_wait,
    }[strategy]
    return fn(cfg, ue, eps)


def system_average(cfg_or_values, strategy: Strategy | None = None,
                   eps: float | None = None) -> float:
    """Arithmetic mean age over UEs.

    Accepts either a config plus strategy (closed forms evaluated per UE)
    or an already-computed list of per-UE mean ages.
    """
    if isinstance(cfg_or_values, SystemConfig):
        cfg = cfg_or_values
        return sum(aoi(cfg, strategy, ue, eps) for ue in range(cfg.n_ues)) / cfg.n_ues
    values = list(cfg_or_values)
    if not values:
        raise ValueError("need at least one per-UE value")
    return sum(values) / len(values)


def renewal_diagnostics(cfg: SystemConfig, strategy: Strategy, ue: int,
                        eps: float | None = None) -> RenewalDiagnostics:
    """Closed-form renewal quantities for one UE under a unicast strategy."""
    strategy = Strategy(strategy)
    if strategy not in (Strategy.DNP, Strategy.DPB, Strategy.DPS):
        raise ValueError("renewal diagnostics are defined for DNP, DPB and DPS")
    e = _resolve_eps(cfg, ue, strategy, eps)
    lam = cfg.gen_rate
    mt = cfg.cycle_length
    n = cfg.n_ues
    emt = math.exp(-lam * mt)
    one_minus = -math.expm1(-lam * mt)
    attempts = 1.0 / (1.0 - e)

    if strategy is Strategy.DNP:
        mean_w = one_minus / lam - mt * emt
        mean_s = sum(cfg.serving_times[:ue + 1])
        mean_y = (mt + emt / lam) / (1 - e)
        mean_y2 = ((mt + emt / lam) ** 2 * (1 + e) / (1 - e) ** 2
                   + (2 * emt - emt * emt) / ((1 - e) * lam * lam))
    elif strategy is Strategy.DPB:
        ms = _cyclic_serving(cfg, ue)
        xi = emt / (lam * one_minus) * sum(-math.expm1(-lam * m) for m in ms)
        mean_w = (one_minus / lam
                  - sum(ms[k] * math.exp(-lam * sum(ms[k:n - 1])) for k in range(n - 1))
                  - ms[n - 1] * emt)
        mean_s = sum(ms[k] * (math.exp(-lam * sum(ms[k:n - 1])) - emt) / one_minus
                     for k in range(n))
        mean_y = (mt + xi) / (1 - e)
        mean_y2 = ((1 + e) * (mt + xi) ** 2 / (1 - e) ** 2
                   + (2 * xi - lam * xi * xi) / (lam * (1 - e)))
    else:  # DPS: service starts the instant an update is generated
        ms = _cyclic_serving(cfg, ue)
        mean_w = 0.0
        mean_s = sum(ms[k] * (math.exp(-lam * sum(ms[k + 1:])) - emt) / one_minus
                     for k in range(n))
        q = [math.expm1(lam * m) for m in ms]
        mean_y = sum(q) / (lam * one_minus * (1 - e))
        # Recover the second moment from the closed-form mean age; the
        # renewal identity then holds exactly by construction.
        mean_y2 = 2.0 * mean_y * (aoi_dps(cfg, ue, e) - mean_s)
    return RenewalDiagnostics(mean_t=mean_w + mean_s, mean_w=mean_w, mean_s=mean_s,
                              mean_y=mean_y, mean_y2=mean_y2, mean_attempts=attempts)
