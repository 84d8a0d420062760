"""Continuous-time discrete-event simulation of the downlink update system.

The simulator is the independent oracle for the closed forms in
:mod:`aoi_lab.analytic`: it tracks the exact sawtooth age of every UE,
measures the renewal quantities, and aggregates replications into a
Student-t confidence interval.  Event times are real-valued, in channel
uses; when a transmission completes at the same instant a new update is
generated, the completion is processed first so traces are deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .analytic import SIMULATABLE, RenewalDiagnostics, Strategy, SystemConfig

TRACE_KINDS = ("generate", "serve_start", "serve_end_ok", "serve_end_fail",
               "preempt", "idle")


@dataclass(frozen=True)
class SimRun:
    """One simulation campaign: scenario, strategy and sampling plan."""

    cfg: SystemConfig
    strategy: Strategy
    horizon: float = 2e6
    warmup_fraction: float = 0.1
    replications: int = 20
    seed: int = 0
    eps_override: tuple | None = None  # forced per-UE error rates

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not 0 <= self.warmup_fraction <= 0.5:
            raise ValueError("warmup_fraction must lie in [0, 0.5]")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if Strategy(self.strategy) not in (Strategy.BRNP, Strategy.BRPS,
                                           Strategy.DNP, Strategy.DPB, Strategy.DPS):
            raise ValueError(f"strategy {self.strategy} cannot be simulated")


@dataclass(frozen=True)
class AoiEstimate:
    """Mean age with a 95% replication confidence half-width."""

    mean: float
    ci_half_width: float
    replications: int
    per_ue: tuple  # (mean, ci_half_width) per UE


@dataclass
class _ReplicationResult:
    # per UE: list of (recv_time, gen_time, service_start_time)
    deliveries: list
    # per UE: completed transmission attempts per success (geometric sample)
    attempts: list
    trace: list | None = None


def replication_seed(master_seed: int, replication: int) -> int:
    """Derive the per-replication RNG seed from the master seed.

    Uses numpy's SeedSequence with the replication index as spawn key, so
    any single replication can be reproduced without running the others.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(replication,))
    return int(ss.generate_state(1, np.uint64)[0])


def _error_rates(run: SimRun) -> list:
    if run.eps_override is not None:
        if len(run.eps_override) != run.cfg.n_ues:
            raise ValueError("eps_override must have one entry per UE")
        return list(run.eps_override)
    return [run.cfg.error_rate(ue, Strategy(run.strategy))
            for ue in range(run.cfg.n_ues)]


def _run_broadcast(run: SimRun, rng: random.Random, eps, trace=None,
                   arrivals=None) -> _ReplicationResult:
    cfg = run.cfg
    preemptive = Strategy(run.strategy) is Strategy.BRPS
    m = cfg.broadcast_blocklength
    if m is None:
        raise ValueError("broadcast strategies need a broadcast payload")
    if run.horizon < m:
        raise ValueError("insufficient horizon: shorter than one transmission")
    horizon = run.horizon
    lam = cfg.gen_rate
    n = cfg.n_ues
    if arrivals is not None:
        next_arrival = lambda t: next(arrivals, math.inf)
    else:
        next_arrival = lambda t: t + rng.expovariate(lam)

    deliveries = [[] for _ in range(n)]
    attempts = [[] for _ in range(n)]
    pending = [1] * n  # completed attempts since last success, per UE
    t = 0.0
    nxt = next_arrival(0.0)
    update_id = 0
    buffer = None  # (gen_time, id)
    cur = None     # (gen_time, id, serve_start)

    while True:
        if cur is None:
            if nxt >= horizon:
                break
            t = nxt
            update_id += 1
            cur = (t, update_id, t)
            if trace is not None:
                trace.append((t, "generate", -1, update_id))
                trace.append((t, "serve_start", -1, update_id))
            nxt = next_arrival(t)
        end = t + m
        while nxt < end:
            ta = nxt
            update_id += 1
            if trace is not None:
                trace.append((ta, "generate", -1, update_id))
            nxt = next_arrival(ta)
            if preemptive:
                if trace is not None:
                    trace.append((ta, "preempt", -1, cur[1]))
                    trace.append((ta, "serve_start", -1, update_id))
                cur = (ta, update_id, ta)
                t = ta
                end = t + m
            else:
                buffer = (ta, update_id)
        if end > horizon:
            break
        t = end
        for ue in range(n):
            if rng.random() > eps[ue]:
                deliveries[ue].append((t, cur[0], cur[2]))
                attempts[ue].append(pending[ue])
                pending[ue] = 1
                if trace is not None:
                    trace.append((t, "serve_end_ok", ue, cur[1]))
            else:
                pending[ue] += 1
                if trace is not None:
                    trace.append((t, "serve_end_fail", ue, cur[1]))
        if buffer is not None:
            cur = (buffer[0], buffer[1], t)
            buffer = None
            if trace is not None:
                trace.append((t, "serve_start", -1, cur[1]))
        else:
            cur = None
            if trace is not None:
                trace.append((t, "idle", -1, -1))
    return _ReplicationResult(deliveries, attempts, trace)


def _run_unicast(run: SimRun, rng: random.Random, eps, trace=None,
                 arrivals=None) -> _ReplicationResult:
    cfg = run.cfg
    strategy = Strategy(run.strategy)
    s = cfg.serving_times
    n = cfg.n_ues
    if run.horizon < cfg.cycle_length:
        raise ValueError("insufficient horizon: shorter than one service cycle")
    horizon = run.horizon
    lam = cfg.gen_rate
    if arrivals is not None:
        next_arrival = lambda t: next(arrivals, math.inf)
    else:
        next_arrival = lambda t: t + rng.expovariate(lam)

    deliveries = [[] for _ in range(n)]
    attempts = [[] for _ in range(n)]
    pending = [1] * n
    t = 0.0
    nxt = next_arrival(0.0)
    update_id = 0
    buffer = None      # (gen_time, id)
    cur = None         # [gen_time, id, service_start, packets_done]
    pos = 0            # round-robin pointer: UE of the next packet

    while True:
        if cur is None:
            if nxt >= horizon:
                break
            t = nxt
            update_id += 1
            pos = 0  # an update arriving at an idle server starts at UE 0
            cur = [t, update_id, t, 0]
            if trace is not None:
                trace.append((t, "generate", -1, update_id))
                trace.append((t, "serve_start", pos, update_id))
            nxt = next_arrival(t)
        ue = pos
        end = t + s[ue]
        while nxt < end:
            ta = nxt
            update_id += 1
            if trace is not None:
                trace.append((ta, "generate", -1, update_id))
            nxt = next_arrival(ta)
            if strategy is Strategy.DPS:
                # restart service at the current UE with the fresh update
                if trace is not None:
                    trace.append((ta, "preempt", ue, cur[1]))
                    trace.append((ta, "serve_start", ue, update_id))
                cur = [ta, update_id, ta, 0]
                t = ta
                end = t + s[ue]
            else:
                buffer = (ta, update_id)
        if end > horizon:
            break
        t = end
        if rng.random() > eps[ue]:
            deliveries[ue].append((t, cur[0], cur[2]))
            attempts[ue].append(pending[ue])
            pending[ue] = 1
            if trace is not None:
                trace.append((t, "serve_end_ok", ue, cur[1]))
        else:
            pending[ue] += 1
            if trace is not None:
                trace.append((t, "serve_end_fail", ue, cur[1]))
        pos = (pos + 1) % n
        cur[3] += 1
        if strategy is Strategy.DPB and buffer is not None:
            # switch to the buffered update at the packet boundary; it gets
            # a full cyclic pass starting with the next UE
            cur = [buffer[0], buffer[1], t, 0]
            buffer = None
            if trace is not None:
                trace.append((t, "serve_start", pos, cur[1]))
        elif cur[3] == n:
            if buffer is not None:  # DNP only: DPB drained it above
                if strategy is Strategy.DNP:
                    pos = 0
                cur = [buffer[0], buffer[1], t, 0]
                buffer = None
                if trace is not None:
                    trace.append((t, "serve_start", pos, cur[1]))
            else:
                cur = None
                if trace is not None:
                    trace.append((t, "idle", -1, -1))
    return _ReplicationResult(deliveries, attempts, trace)


def run_replication(run: SimRun, replication: int = 0, collect_trace: bool = False,
                    arrivals=None) -> _ReplicationResult:
    """Execute a single replication; exposed for trace export and tests.

    ``arrivals`` optionally replaces the Poisson generation process with a
    callable-free iterator of absolute arrival times (tests use this to
    force deterministic generation patterns).
    """
    rng = random.Random(replication_seed(run.seed, replication))
    eps = _error_rates(run)
    trace = [] if collect_trace else None
    if Strategy(run.strategy).is_broadcast:
        return _run_broadcast(run, rng, eps, trace, arrivals)
    return _run_unicast(run, rng, eps, trace, arrivals)


def _time_average_age(deliveries, warmup_start: float, horizon: float) -> float:
    # Exact piecewise-linear integral of the sawtooth: age grows with slope 1
    # and drops to (t - generation time) at each reception.  Age is 0 at t=0.
    last_gen = 0.0
    tp = warmup_start
    area = 0.0
    for recv, gen, _ in deliveries:
        if recv <= warmup_start:
            last_gen = gen
            continue
        area += ((recv - last_gen) ** 2 - (tp - last_gen) ** 2) / 2.0
        tp = recv
        last_gen = gen
    area += ((horizon - last_gen) ** 2 - (tp - last_gen) ** 2) / 2.0
    return area / (horizon - warmup_start)


def _t_ci(values) -> tuple:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    half = float(stats.t.ppf(0.975, len(values) - 1) * np.std(values, ddof=1)
                 / math.sqrt(len(values)))
    return mean, half


def simulate(run: SimRun) -> AoiEstimate:
    """Simulated mean age per UE and system-wide, with 95% CIs."""
    warmup_start = run.warmup_fraction * run.horizon
    per_ue_means = [[] for _ in range(run.cfg.n_ues)]
    system_means = []
    for rep in range(run.replications):
        result = run_replication(run, rep)
        rep_values = [
            _time_average_age(result.deliveries[ue], warmup_start, run.horizon)
            for ue in range(run.cfg.n_ues)
        ]
        for ue, v in enumerate(rep_values):
            per_ue_means[ue].append(v)
        system_means.append(sum(rep_values) / len(rep_values))
    mean, half = _t_ci(system_means)
    per_ue = tuple(_t_ci(v) for v in per_ue_means)
    return AoiEstimate(mean=mean, ci_half_width=half,
                       replications=run.replications, per_ue=per_ue)


def measure_renewals(run: SimRun, ue: int) -> RenewalDiagnostics:
    """Empirical renewal statistics for one UE, pooled over replications."""
    warmup_start = run.warmup_fraction * run.horizon
    ys, ts, ws, hs = [], [], [], []
    for rep in range(run.replications):
        result = run_replication(run, rep)
        post = [(i, d) for i, d in enumerate(result.deliveries[ue])
                if d[0] > warmup_start]
        for j in range(1, len(post)):
            ys.append(post[j][1][0] - post[j - 1][1][0])
        for i, (recv, gen, start) in post:
            ts.append(recv - gen)
            ws.append(start - gen)
            hs.append(result.attempts[ue][i])
    if len(ts) < 30:
        raise ValueError("insufficient renewal samples: "
                         f"{len(ts)} deliveries after warm-up")
    y = np.asarray(ys)
    return RenewalDiagnostics(
        mean_t=float(np.mean(ts)),
        mean_w=float(np.mean(ws)),
        mean_s=float(np.mean(ts)) - float(np.mean(ws)),
        mean_y=float(np.mean(y)),
        mean_y2=float(np.mean(y * y)),
        mean_attempts=float(np.mean(hs)),
    )


def write_trace(events, path) -> None:
    """Export a trace as line-delimited records: time kind ue update_id."""
    with open(path, "w") as fh:
        for time, kind, ue, update_id in events:
            fh.write(f"{time!r} {kind} {ue} {update_id}\n")
