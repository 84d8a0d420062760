"""Finite-blocklength link math and the special functions it needs.

Everything here is a pure function of its arguments: the Gaussian
Q-function, the normal-approximation block error rate for short packets,
the exponential integral Ei, and the harmonic-mean channel capacity over
an annular cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG2E = math.log2(math.e)
_EULER_GAMMA = 0.5772156649015328606

#: Below this blocklength the normal approximation for the block error
#: rate is known to lose accuracy; callers may want to surface a warning.
SHORT_BLOCKLENGTH = 100


@dataclass(frozen=True)
class LinkBudget:
    """One point-to-point link: received SNR, payload bits, blocklength."""

    snr: float
    info_bits: float
    blocklength: float

    def __post_init__(self):
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise ValueError("snr must be positive and finite")
        if self.info_bits < 1:
            raise ValueError("info_bits must be >= 1")
        if self.blocklength < 1:
            raise ValueError("blocklength must be >= 1")

    @property
    def coding_rate(self) -> float:
        return self.info_bits / self.blocklength

    @property
    def short_blocklength(self) -> bool:
        """True when the normal approximation is outside its trusted regime."""
        return self.blocklength < SHORT_BLOCKLENGTH


def q_function(x: float) -> float:
    """Standard normal tail probability P[Z > x]."""
    if not math.isfinite(x):
        raise ValueError("q_function requires a finite argument")
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def block_error_rate(link: LinkBudget, dispersion_form: str = "as_printed") -> float:
    """Normal-approximation block error rate of a short packet on an AWGN link.

    ``dispersion_form`` selects the channel-dispersion denominator:
    ``"as_printed"`` uses 1 - 1/(1 + snr^2); ``"squared"`` uses the
    1 - 1/(1 + snr)^2 variant for sensitivity studies.
    """
    g = link.snr
    if dispersion_form == "as_printed":
        v = 1.0 - 1.0 / (1.0 + g * g)
    elif dispersion_form == "squared":
        v = 1.0 - 1.0 / (1.0 + g) ** 2
    else:
        raise ValueError(f"unknown dispersion_form: {dispersion_form!r}")
    capacity = 0.5 * math.log2(1.0 + g)
    dispersion = LOG2E * math.sqrt(v / (2.0 * link.blocklength))
    return q_function((capacity - link.coding_rate) / dispersion)


def _ei_series(x: float) -> float:
    # Ei(x) = gamma + ln|x| + sum x^k / (k * k!)
    total = 0.0
    term = 1.0
    for k in range(1, 1000):
        term *= x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-17 * max(1.0, abs(total)):
            break
    return _EULER_GAMMA + math.log(abs(x)) + total


def _e1_continued_fraction(t: float) -> float:
    # E1(t) = exp(-t) / (t + 1 - 1/(t + 3 - 4/(t + 5 - 9/(...)))), t > 0.
    # Modified Lentz evaluation.
    tiny = 1e-300
    b = t + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for k in range(1, 500):
        a = -(k * k)
        b += 2.0
        d = 1.0 / (b + a * d) if b + a * d != 0 else 1.0 / tiny
        c = b + a / c if c != 0 else tiny
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-t) * h


def _ei_asymptotic(x: float) -> float:
    # Ei(x) ~ (e^x / x) * sum k!/x^k, truncated at the smallest term.
    total = 1.0
    term = 1.0
    for k in range(1, 200):
        nxt = term * k / x
        if abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.exp(x) / x * total


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x), principal value for x > 0."""
    if x == 0.0:
        raise ValueError("Ei has a logarithmic singularity at 0")
    if not math.isfinite(x):
        raise ValueError("exp_integral_ei requires a finite argument")
    if x > 40.0:
        return _ei_asymptotic(x)
    if x >= -6.0:
        return _ei_series(x)
    return -_e1_continued_fraction(-x)


def annulus_capacity(ref_snr: float, pathloss_exp: float, distance: float) -> float:
    """High-SNR channel capacity at ``distance`` under the power-law path loss.

    The reference capacity at unit distance is 0.5*log2(1 + ref_snr); the
    distance term enters through the high-SNR expansion, so the value is
    log-linear in the distance.  This convention is used consistently by
    the annulus expectations below and by the dynamic-system estimators.
    """
    return 0.5 * math.log2(1.0 + ref_snr) - 0.5 * pathloss_exp * math.log2(distance)


def harmonic_capacity(dynamic) -> float:
    """Harmonic-mean capacity over an annulus of uniformly placed UEs.

    ``dynamic`` must expose inner_radius, outer_radius, pathloss_exp and
    ref_snr.  The result C satisfies 1/C = E[1/capacity] for a UE placed
    uniformly in area between the two radii, with capacity per
    :func:`annulus_capacity`; it therefore lies strictly between the edge
    capacities.
    """
    d1, d2 = dynamic.inner_radius, dynamic.outer_radius
    eta = dynamic.pathloss_exp
    c0 = 0.5 * math.log2(1.0 + dynamic.ref_snr)
    u1 = annulus_capacity(dynamic.ref_snr, eta, d1)
    u2 = annulus_capacity(dynamic.ref_snr, eta, d2)
    if u2 <= 0:
        raise ValueError("high-SNR approximation invalid at outer radius")
    a = 4.0 * math.log(2.0) / eta
    prefactor = 2.0 ** (2.0 + 4.0 * c0 / eta) * math.log(2.0) / ((d2 * d2 - d1 * d1) * eta)
    inverse = prefactor * (exp_integral_ei(-a * u1) - exp_integral_ei(-a * u2))
    return 1.0 / inverse
