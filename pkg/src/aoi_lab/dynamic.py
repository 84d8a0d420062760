"""Monte Carlo estimation of the dynamic system's expected average age.

UEs are dropped on an annulus by a 2D Poisson point process; each carries
the common payload plus its individual payload, and the per-realization
zero-waiting age is evaluated for the broadcast and unicast schemes.  The
estimator is the oracle for the closed-form approximations in
:mod:`aoi_lab.selector`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import fbl
from .sim import AoiEstimate


@dataclass(frozen=True)
class DynamicConfig:
    """Annulus geometry, UE intensity and payload split of the dynamic system."""

    ue_intensity: float
    inner_radius: float
    outer_radius: float
    pathloss_exp: float
    ref_snr: float          # received SNR at unit distance
    overhead: float = 0.0
    common_bits: float = 0.0
    individual_bits: float = 0.0

    def __post_init__(self):
        if self.inner_radius < 1:
            raise ValueError("inner_radius must be >= 1")
        if self.outer_radius <= self.inner_radius:
            raise ValueError("outer_radius must exceed inner_radius")
        if self.pathloss_exp < 2:
            raise ValueError("pathloss_exp must be >= 2")
        if not (self.ue_intensity > 0 and self.ref_snr > 0):
            raise ValueError("ue_intensity and ref_snr must be positive")
        if self.common_bits < 0 or self.individual_bits < 0:
            raise ValueError("payload sizes must be >= 0")

    @classmethod
    def from_edge_snr(cls, edge_snr, **kwargs) -> "DynamicConfig":
        """Build a config specifying the SNR at the outer radius instead of at unit distance."""
        eta = kwargs["pathloss_exp"]
        d2 = kwargs["outer_radius"]
        return cls(ref_snr=edge_snr * d2**eta, **kwargs)

    @classmethod
    def with_mean_ue_count(cls, mean_ue_count, **kwargs) -> "DynamicConfig":
        """Build a config from the mean number of UEs instead of the intensity."""
        d1, d2 = kwargs["inner_radius"], kwargs["outer_radius"]
        area = math.pi * (d2 * d2 - d1 * d1)
        return cls(ue_intensity=mean_ue_count / area, **kwargs)

    @property
    def mean_ue_count(self) -> float:
        """Mean number of UEs on the annulus."""
        return self.ue_intensity * math.pi * (self.outer_radius**2 - self.inner_radius**2)

    @property
    def info_split_ratio(self) -> float:
        """Individual-to-common payload ratio."""
        if self.common_bits <= 0:
            raise ValueError("common_bits must be positive for the split ratio")
        return self.individual_bits / self.common_bits

    def capacity_at(self, distance: float) -> float:
        return fbl.annulus_capacity(self.ref_snr, self.pathloss_exp, distance)

    @property
    def outer_capacity(self) -> float:
        return self.capacity_at(self.outer_radius)

    @property
    def inner_capacity(self) -> float:
        return self.capacity_at(self.inner_radius)


def sample_realization(cfg: DynamicConfig, rng) -> np.ndarray:
    """Draw one PPP realization: UE distances to the base station.

    The count is Poisson with the annulus mean; distances follow the
    uniform-in-area law via inverse-CDF sampling.
    """
    n = rng.poisson(cfg.mean_ue_count)
    u = rng.random(n)
    d1sq, d2sq = cfg.inner_radius**2, cfg.outer_radius**2
    return np.sqrt(d1sq + u * (d2sq - d1sq))


def realization_aoi(cfg: DynamicConfig, distances, scheme: str,
                    rate_backoff: float | None = None) -> float:
    """Zero-waiting system age of one realization under a scheme.

    ``scheme`` is ``"broadcast"`` (joint packet at the outer-edge rate) or
    ``"unicast"`` (per-UE packets, nearest UE served first).  By default the
    coding rate sits at capacity and decoding never fails; ``rate_backoff``
    c < 1 instead encodes at rate c * capacity and applies the resulting
    finite-blocklength error rate.
    """
    distances = np.asarray(distances, dtype=float)
    n = len(distances)
    if n == 0:
        raise ValueError("realization must contain at least one UE")
    if scheme == "broadcast":
        c2 = cfg.outer_capacity
        if c2 <= 0:
            raise ValueError("high-SNR approximation invalid at outer radius")
        bits = cfg.common_bits + n * cfg.individual_bits
        m = bits / c2
        if rate_backoff is None:
            return 1.5 * m
        link = fbl.LinkBudget(cfg.ref_snr * cfg.outer_radius**-cfg.pathloss_exp,
                              bits, m / rate_backoff)
        e = fbl.block_error_rate(link)
        return (1 + e) / (2 * (1 - e)) * (m / rate_backoff) + m / rate_backoff
    if scheme != "unicast":
        raise ValueError(f"unknown scheme: {scheme!r}")

    caps = np.array([cfg.capacity_at(d) for d in np.sort(distances)])
    if np.any(caps <= 0):
        raise ValueError("UE beyond decodable range under approximation")
    bits = cfg.common_bits + cfg.individual_bits
    if rate_backoff is None:
        blocklengths = bits / caps
        eps = np.zeros(n)
    else:
        blocklengths = bits / (rate_backoff * caps)
        snrs = cfg.ref_snr * np.sort(distances)**-cfg.pathloss_exp
        eps = np.array([fbl.block_error_rate(fbl.LinkBudget(g, bits, m))
                        for g, m in zip(snrs, blocklengths)])
    serving = blocklengths + cfg.overhead  # sorted ascending: nearest first
    mt = float(np.sum(serving))
    suffix = np.concatenate([np.cumsum(serving[::-1])[::-1][1:], [0.0]])
    per_ue = (1 + eps) / (2 * (1 - eps)) * mt + mt - suffix
    return float(np.mean(per_ue))


def expected_aoi_monte_carlo(cfg: DynamicConfig, scheme: str, realizations: int,
                             seed: int = 0,
                             rate_backoff: float | None = None) -> AoiEstimate:
    """Expected system age over PPP realizations (empty draws contribute 0)."""
    if realizations < 100:
        raise ValueError("need at least 100 realizations")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    values = np.empty(realizations)
    for i in range(realizations):
        distances = sample_realization(cfg, rng)
        values[i] = (realization_aoi(cfg, distances, scheme, rate_backoff)
                     if len(distances) else 0.0)
    mean = float(np.mean(values))
    half = float(stats.t.ppf(0.975, realizations - 1) * np.std(values, ddof=1)
                 / math.sqrt(realizations))
    return AoiEstimate(mean=mean, ci_half_width=half,
                       replications=realizations, per_ue=())
