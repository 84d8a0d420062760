"""Transmission-scheme selection: broadcast vs unicast thresholds.

For the remote-control system (homogeneous UEs, stochastic generation) the
information-ratio threshold is the root of a scalar residual solved by
bisection.  For the dynamic system (PPP-distributed UEs, zero waiting) the
individual-to-common payload threshold has a closed form built on the
harmonic-mean annulus capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import fbl
from .dynamic import DynamicConfig

_RESIDUAL_RTOL = 1e-10
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class RemoteControlScenario:
    """Homogeneous remote-control cell: N identical UEs behind one cycle."""

    n_ues: int
    gen_rate: float
    cycle: float       # total unicast round length
    tx_ratio: float    # transmission time over serving time, in (0, 1]

    def __post_init__(self):
        if self.n_ues < 1:
            raise ValueError("n_ues must be >= 1")
        if not self.gen_rate > 0:
            raise ValueError("gen_rate must be positive")
        if not self.cycle > 0:
            raise ValueError("cycle must be positive")
        if not 0 < self.tx_ratio <= 1:
            raise ValueError("tx_ratio must lie in (0, 1]")

    @classmethod
    def from_link(cls, n_ues, gen_rate, bits, coding_rate, overhead) -> "RemoteControlScenario":
        """Build from per-UE payload/rate/overhead instead of cycle geometry."""
        m_h = bits / coding_rate
        return cls(n_ues=n_ues, gen_rate=gen_rate,
                   cycle=n_ues * (m_h + overhead), tx_ratio=m_h / (m_h + overhead))


@dataclass(frozen=True)
class ThresholdResult:
    """A selection threshold plus how trustworthy / decisive it is.

    ``dominance`` is None when the threshold splits the range, otherwise
    "broadcast" or "unicast" when one scheme wins everywhere.  For the
    information-ratio threshold, values above 1 are reported as-is (the
    ratio itself cannot exceed 1, so broadcast wins for every feasible
    value); ``extra_roots`` lists further sign changes if the residual is
    unexpectedly non-monotone.
    """

    value: float
    dominance: str | None = None
    extra_roots: tuple = ()


def waiting_shape(omega: float) -> float:
    """Waiting-time helper (2e^-w - e^-2w)/(w + e^-w) - e^-w; zero at w=0."""
    ew = math.exp(-omega)
    return (2.0 * ew - ew * ew) / (omega + ew) - ew


def _alpha_residual(sc: RemoteControlScenario, alpha: float) -> float:
    # broadcast-minus-unicast mean age, up to a positive factor
    lam, mt, rho, n = sc.gen_rate, sc.cycle, sc.tx_ratio, sc.n_ues
    wb = lam * alpha * rho * mt
    wu = lam * mt
    lhs = (1.5 - math.exp(-wb)) * alpha * rho * mt + waiting_shape(wb) / (2 * lam)
    rhs = ((2 * n + 1) / (2 * n) - math.exp(-wu)) * mt + waiting_shape(wu) / (2 * lam)
    return lhs - rhs


def alpha_threshold(sc: RemoteControlScenario) -> ThresholdResult:
    """Information-ratio threshold: broadcast wins iff the ratio is below it.

    Solved by bisection of the scheme-difference residual on (0, 1],
    expanding the bracket up to 1/tx_ratio when the root lies above 1.
    """
    lo, hi = 1e-9, 1.0
    f = lambda a: _alpha_residual(sc, a)
    flo, fhi = f(lo), f(hi)
    if flo > 0:
        # unicast already better for vanishing ratio
        return ThresholdResult(value=lo, dominance="unicast")
    if fhi < 0:
        hi = 1.0 / sc.tx_ratio
        fhi = f(hi)
        if fhi < 0:
            return ThresholdResult(value=hi, dominance="broadcast")
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm <= 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    root = 0.5 * (lo + hi)
    # certification scale: the residual is a difference of terms of size
    # ~cycle and ~1/(2 gen_rate), so its evaluation noise floor scales with
    # the larger of the two
    scale = max(1.0, abs(_alpha_residual(sc, 1.0) - _alpha_residual(sc, 1e-9)),
                sc.cycle, 0.5 / sc.gen_rate)
    if abs(f(root)) > _RESIDUAL_RTOL * scale:
        raise ArithmeticError("bisection failed to certify the threshold residual")
    extras = _scan_extra_roots(f, root)
    dominance = "broadcast" if root > 1.0 else None
    return ThresholdResult(value=root, dominance=dominance, extra_roots=extras)


def _scan_extra_roots(f, known_root, points: int = 200) -> tuple:
    # the residual is expected to be monotone; report any surprise roots
    extras = []
    prev_a, prev_f = 1e-9, f(1e-9)
    for i in range(1, points + 1):
        a = 1e-9 + i * (1.0 - 1e-9) / points
        fa = f(a)
        if prev_f * fa < 0 and not (prev_a <= known_root <= a):
            extras.append(0.5 * (prev_a + a))
        prev_a, prev_f = a, fa
    return tuple(extras)


def alpha_threshold_limits(sc: RemoteControlScenario) -> tuple:
    """Closed-form threshold limits: (zero-waiting, sporadic generation)."""
    n, rho = sc.n_ues, sc.tx_ratio
    return (2 * n + 1) / (3 * n * rho), (n + 1) / (2 * n * rho)


def expected_aoi_broadcast(cfg: DynamicConfig) -> float:
    """Closed-form expected zero-waiting age of the broadcast scheme."""
    c2 = cfg.outer_capacity
    if c2 <= 0:
        raise ValueError("high-SNR approximation invalid at outer radius")
    lam = cfg.mean_ue_count
    grown = -math.expm1(-lam)
    return 1.5 / c2 * (grown * cfg.common_bits + lam * cfg.individual_bits)


def expected_aoi_unicast(cfg: DynamicConfig) -> float:
    """Closed-form expected zero-waiting age of the unicast scheme."""
    if cfg.outer_capacity <= 0:
        raise ValueError("high-SNR approximation invalid at outer radius")
    c_h = fbl.harmonic_capacity(cfg)
    lam = cfg.mean_ue_count
    grown = -math.expm1(-lam)
    return (grown / 2 + lam) * ((cfg.common_bits + cfg.individual_bits) / c_h
                                + cfg.overhead)


def beta_threshold(cfg: DynamicConfig) -> ThresholdResult:
    """Individual-to-common payload threshold for the dynamic system.

    Broadcast is preferred when the split ratio is at or below the returned
    value.  A non-positive denominator means the scheme difference never
    changes sign in the ratio; the dominance flag then names the winner.
    """
    c2 = cfg.outer_capacity
    if c2 <= 0:
        raise ValueError("high-SNR approximation invalid at outer radius")
    if cfg.common_bits <= 0:
        raise ValueError("common_bits must be positive")
    c_h = fbl.harmonic_capacity(cfg)
    lam = cfg.mean_ue_count
    a = -math.expm1(-lam)  # 1 - e^-mean_count
    denom = 3 * lam / c2 - (a + 2 * lam) / c_h
    numer = (a + 2 * lam) / c_h - 3 * a / c2 \
        + (a + 2 * lam) * cfg.overhead / cfg.common_bits
    if denom <= 0:
        # broadcast grows more slowly in the ratio than unicast: whichever
        # scheme wins at ratio 0 wins everywhere above the (absent) crossing
        diff_at_zero = (1.5 * a / c2 * cfg.common_bits
                        - (a / 2 + lam) * (cfg.common_bits / c_h + cfg.overhead))
        return ThresholdResult(value=math.inf,
                               dominance="broadcast" if diff_at_zero <= 0 else "unicast")
    return ThresholdResult(value=numer / denom)


def beta_threshold_large_cell(cfg: DynamicConfig) -> float:
    """Large-population, negligible-overhead approximation of the threshold."""
    c2 = cfg.outer_capacity
    c_h = fbl.harmonic_capacity(cfg)
    return 2 * c2 / (3 * c_h - 2 * c2)
