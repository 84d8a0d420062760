import itertools
import math

import numpy as np
import pytest

from aoi_lab import analytic, fbl
from aoi_lab.analytic import DivergentAoiError, Strategy, SystemConfig


def homog(n=3, bits=100.0, snr=3.0, lam=0.002, rate=0.85, overhead=10.0, alpha=1.0):
    return SystemConfig.homogeneous(n_ues=n, bits=bits, snr=snr, gen_rate=lam,
                                    coding_rate=rate, overhead=overhead, alpha=alpha)


def hetero(blocklengths, lam=0.002, overhead=10.0, snr=3.0):
    n = len(blocklengths)
    return SystemConfig(
        n_ues=n, gen_rate=lam,
        per_ue_bits=tuple(0.8 * m for m in blocklengths),
        per_ue_blocklength=tuple(blocklengths),
        per_ue_snr=(snr,) * n, overhead=overhead)


def test_config_validation():
    with pytest.raises(ValueError):
        SystemConfig.homogeneous(n_ues=0, bits=100, snr=3, gen_rate=0.002, coding_rate=0.85)
    with pytest.raises(ValueError):
        SystemConfig.homogeneous(n_ues=3, bits=100, snr=3, gen_rate=0.0, coding_rate=0.85)
    with pytest.raises(ValueError):
        SystemConfig.homogeneous(n_ues=3, bits=100, snr=3, gen_rate=0.002,
                                 coding_rate=0.85, alpha=1.5)
    cfg = homog()
    assert cfg.cycle_length == pytest.approx(3 * (100 / 0.85 + 10))
    assert cfg.info_ratio == pytest.approx(1.0)


def test_zero_wait_hand_values():
    # homogeneous N=3, per-UE serving 40, error-free: cycle 120
    cfg = SystemConfig(n_ues=3, gen_rate=0.002, per_ue_bits=(30.0,) * 3,
                       per_ue_blocklength=(40.0,) * 3, per_ue_snr=(3.0,) * 3)
    dnpz = [analytic.aoi_dnp_zero_wait(cfg, u, eps=0.0) for u in range(3)]
    dpbz = [analytic.aoi_dpb_zero_wait(cfg, u, eps=0.0) for u in range(3)]
    assert dnpz == pytest.approx([100.0, 140.0, 180.0])
    assert dpbz == pytest.approx([100.0, 100.0, 100.0])
    assert analytic.system_average(dnpz) == pytest.approx(140.0)


def test_system_average_list_form():
    assert analytic.system_average([100.0]) == 100.0
    assert analytic.system_average([100.0, 200.0, 300.0]) == 200.0
    with pytest.raises(ValueError):
        analytic.system_average([])


def test_single_ue_zero_overhead_zero_wait_identity():
    cfg = SystemConfig(n_ues=1, gen_rate=0.01, per_ue_bits=(80.0,),
                       per_ue_blocklength=(100.0,), per_ue_snr=(3.0,))
    a = analytic.aoi_dnp_zero_wait(cfg, 0, eps=0.0)
    b = analytic.aoi_dpb_zero_wait(cfg, 0, eps=0.0)
    assert a == pytest.approx(b) == pytest.approx(150.0)


def test_reduction_dnp_to_brnp():
    rng = np.random.default_rng(11)
    for _ in range(100):
        lam = rng.uniform(1e-4, 0.05)
        m = rng.uniform(20, 400)
        eps = rng.uniform(0, 0.9)
        cfg = SystemConfig(n_ues=1, gen_rate=lam, per_ue_bits=(0.8 * m,),
                           per_ue_blocklength=(m,), per_ue_snr=(3.0,),
                           broadcast_bits=0.8 * m, broadcast_blocklength=m)
        a = analytic.aoi_dnp(cfg, 0, eps=eps)
        b = analytic.aoi_brnp(cfg.broadcast_link(0), lam, eps=eps)
        assert a == pytest.approx(b, rel=1e-10)


def test_reduction_dps_to_brps():
    rng = np.random.default_rng(12)
    for _ in range(100):
        lam = rng.uniform(1e-4, 0.05)
        m = rng.uniform(20, 400)
        eps = rng.uniform(0, 0.9)
        cfg = SystemConfig(n_ues=1, gen_rate=lam, per_ue_bits=(0.8 * m,),
                           per_ue_blocklength=(m,), per_ue_snr=(3.0,),
                           broadcast_bits=0.8 * m, broadcast_blocklength=m)
        a = analytic.aoi_dps(cfg, 0, eps=eps)
        b = analytic.aoi_brps(cfg.broadcast_link(0), lam, eps=eps)
        assert a == pytest.approx(b, rel=1e-10)


def test_zero_wait_is_large_lambda_limit():
    for make in (lambda lam: homog(lam=lam), lambda lam: hetero([80.0, 120.0, 150.0], lam=lam)):
        cfg = make(1e4)
        for u in range(cfg.n_ues):
            assert analytic.aoi_dnp(cfg, u) == pytest.approx(
                analytic.aoi_dnp_zero_wait(cfg, u), rel=1e-4)
            assert analytic.aoi_dpb(cfg, u) == pytest.approx(
                analytic.aoi_dpb_zero_wait(cfg, u), rel=1e-4)


def test_zero_wait_dominance_randomized():
    rng = np.random.default_rng(13)
    for _ in range(60):
        n = int(rng.integers(1, 6))
        ms = rng.uniform(30, 300, size=n)
        cfg = hetero(list(ms), lam=rng.uniform(1e-4, 0.05),
                     overhead=rng.uniform(0, 30))
        eps = rng.uniform(0, 0.9)
        for u in range(n):
            assert (analytic.aoi_dpb_zero_wait(cfg, u, eps=eps)
                    <= analytic.aoi_dnp_zero_wait(cfg, u, eps=eps) + 1e-9)


def test_dnp_prefers_shortest_first():
    # with equal error rates, the system mean is minimized by serving
    # blocklengths in non-decreasing order; exhaustive over permutations
    rng = np.random.default_rng(14)
    for n in (2, 3, 4, 5):
        ms = sorted(rng.uniform(30, 300, size=n))
        lam = rng.uniform(5e-4, 5e-3)
        best = None
        for perm in itertools.permutations(ms):
            cfg = hetero(list(perm), lam=lam)
            val = analytic.system_average(
                [analytic.aoi_dnp(cfg, u, eps=0.05) for u in range(n)])
            if best is None or val < best[0]:
                best = (val, perm)
        sorted_cfg = hetero(ms, lam=lam)
        sorted_val = analytic.system_average(
            [analytic.aoi_dnp(sorted_cfg, u, eps=0.05) for u in range(n)])
        assert sorted_val == pytest.approx(best[0], rel=1e-12)


def test_brnp_decreasing_in_lambda():
    link = fbl.LinkBudget(3.0, 100.0, 125.0)
    lams = np.logspace(-4, -1, 40)
    vals = [analytic.aoi_brnp(link, lam) for lam in lams]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_brps_interior_minimum_at_inverse_blocklength():
    link = fbl.LinkBudget(3.0, 100.0, 125.0)
    lams = np.logspace(-5, -0.5, 2000)
    vals = [analytic.aoi_brps(link, lam) for lam in lams]
    k = int(np.argmin(vals))
    assert 0 < k < len(lams) - 1
    assert lams[k] == pytest.approx(1.0 / 125.0, rel=0.01)


def test_dps_interior_minimum_in_lambda():
    vals = []
    lams = np.logspace(-4, -1, 200)
    for lam in lams:
        cfg = homog(lam=lam, overhead=20.0)
        vals.append(analytic.system_average(cfg, Strategy.DPS))
    k = int(np.argmin(vals))
    assert 0 < k < len(lams) - 1


def test_divergence_guard():
    cfg = homog()
    with pytest.raises(DivergentAoiError):
        analytic.aoi_dnp(cfg, 0, eps=1.0 - 1e-13)
    with pytest.raises(ValueError):
        analytic.aoi_dnp(cfg, 0, eps=-0.1)


def test_preemption_storm_is_infinite():
    # generation so fast that no service interval is ever arrival-free
    cfg = homog(lam=10.0)
    assert analytic.aoi_dps(cfg, 0, eps=0.0) == math.inf
    assert analytic.aoi_brps(cfg.broadcast_link(0), 10.0, eps=0.0) == math.inf


def test_renewal_recombination_identity():
    rng = np.random.default_rng(15)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        cfg = hetero(list(rng.uniform(40, 250, size=n)),
                     lam=rng.uniform(2e-4, 2e-2), overhead=rng.uniform(0, 25))
        eps = rng.uniform(0, 0.8)
        u = int(rng.integers(0, n))
        for strat, fn in ((Strategy.DNP, analytic.aoi_dnp),
                          (Strategy.DPB, analytic.aoi_dpb),
                          (Strategy.DPS, analytic.aoi_dps)):
            d = analytic.renewal_diagnostics(cfg, strat, u, eps=eps)
            assert d.mean_aoi == pytest.approx(fn(cfg, u, eps=eps), rel=1e-10)
            assert d.mean_t == pytest.approx(d.mean_w + d.mean_s, rel=1e-10)
            assert d.mean_y2 >= d.mean_y**2 * (1 - 1e-12)
            assert d.mean_attempts == pytest.approx(1 / (1 - eps), rel=1e-12)


def test_dps_has_no_waiting():
    cfg = homog()
    assert analytic.renewal_diagnostics(cfg, Strategy.DPS, 1).mean_w == 0.0


def test_small_lambda_stability():
    # the preempting strategies are numerically delicate near zero rate:
    # the mean age must stay finite, positive and ~1/lambda
    for lam in (1e-6, 1e-8, 1e-10):
        cfg = homog(lam=lam)
        for strat in (Strategy.DNP, Strategy.DPB, Strategy.DPS):
            v = analytic.system_average(cfg, strat, eps=0.01)
            assert math.isfinite(v) and v > 0
            assert v == pytest.approx(1.0 / (lam * 0.99), rel=0.01)


def test_dispatcher_and_strategy_props():
    cfg = homog()
    for strat in Strategy:
        v = analytic.aoi(cfg, strat, 1)
        assert v > 0
    assert Strategy.BRNP.is_broadcast and not Strategy.DNP.is_broadcast
    assert Strategy.DNPZ.is_zero_wait and not Strategy.DPS.is_zero_wait


def test_positive_and_finite_on_random_grid():
    rng = np.random.default_rng(16)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        cfg = SystemConfig.homogeneous(
            n_ues=n, bits=rng.uniform(50, 200), snr=rng.uniform(1, 8),
            gen_rate=rng.uniform(1e-4, 5e-3), coding_rate=rng.uniform(0.5, 0.9),
            overhead=rng.uniform(0, 25))
        for strat in Strategy:
            v = analytic.system_average(cfg, strat)
            assert math.isfinite(v) and v > 0
