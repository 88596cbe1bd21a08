"""Combining several NAT predictors.

``scs_run`` (Sightless Chasing and Switching) reads one predictor per round.
It splits time into epochs of ``tau`` rounds, lets a bandit learner pick the
predictor of each epoch, restarts the remedy table at every epoch start and
keeps its real cache across epochs.  At the end of an epoch the learner is
charged ``f / tau``, where ``f`` counts the epoch's first round, its
evictions and its hits on pages not yet seen in the epoch.

``multiplexer_run`` sees every predictor every round.  It runs one Sim per
predictor in lockstep and randomly follows one of them, with weights
shrinking geometrically in each Sim's misses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import rng as _rng
from .bandit import make_learner
from .core import (CacheState, RequestTrace, ValidationError, check_cache, default_cache,
                   report_from_log)
from .predictors import BANDIT, FULL_INFORMATION, NatPredictionStream, PredictorPool
from .sim import PROMOTE_LE, SimCore


def icbrt(x: int) -> int:
    r = int(round(x ** (1.0 / 3.0))) if x > 0 else 0
    while r ** 3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


@dataclass(frozen=True)
class EpochSchedule:
    T: int
    tau: int

    def __post_init__(self):
        if self.tau < 1:
            raise ValidationError("epoch length must be positive")

    @classmethod
    def default(cls, T: int, tau: Optional[int] = None) -> "EpochSchedule":
        return cls(T, max(1, icbrt(T)) if tau is None else tau)

    @property
    def count(self) -> int:
        return -(-self.T // self.tau)

    def bounds(self, epoch: int):
        """First and last round of ``epoch`` (1-based)."""
        first = (epoch - 1) * self.tau + 1
        return first, min(epoch * self.tau, self.T)

    def __iter__(self):
        return (self.bounds(e) for e in range(1, self.count + 1))


@dataclass(frozen=True)
class EpochCostRecord:
    epoch: int
    predictor: int
    f: int
    F: float
    evictions: int


def epoch_cost(epoch: int, predictor: int, tau: int, evicted: Sequence, remedy_before: Sequence,
               Z: int) -> EpochCostRecord:
    """Charge for one epoch.

    ``evicted[r]`` is the page evicted in the epoch's ``r``-th round (or
    ``None``) and ``remedy_before[r]`` the remedy of the requested page just
    before that round.  A short final epoch still divides by ``tau``.
    """
    f = 0
    ev = 0
    for r, (out, before) in enumerate(zip(evicted, remedy_before)):
        if out is not None:
            ev += 1
        if r == 0 or out is not None or before == Z + 1:
            f += 1
    return EpochCostRecord(epoch, predictor, f, f / tau, ev)


def run_epoch(core: SimCore, requests: Sequence[int], first: int, last: int, read,
              epoch: int = 1, predictor: int = 1, tau: Optional[int] = None):
    """Serve rounds ``first..last`` with a freshly restarted remedy table.

    ``requests`` is the 0-based request list; ``read(t)`` returns ``p_t``.
    Returns ``(record, evictions)``.
    """
    if tau is None:
        tau = last - first + 1
    evicted = []
    before = []
    for t in range(first, last + 1):
        out, b = core.serve(t, requests[t - 1], read(t), restart=(t == first))
        evicted.append(out)
        before.append(b)
    return epoch_cost(epoch, predictor, tau, evicted, before, core.remedy.Z), evicted


def _bandit_pool(pool) -> PredictorPool:
    if isinstance(pool, PredictorPool):
        if pool.mode != BANDIT:
            raise ValidationError("S-C&S needs a bandit-mode predictor pool")
        return pool
    return PredictorPool(list(pool), BANDIT)


def scs_run(trace: RequestTrace, pool, k: Optional[int] = None,
            initial_cache: Optional[CacheState] = None, tau: Optional[int] = None, seed: int = 0,
            learner: str = "inf", promotion: str = PROMOTE_LE):
    """Run S-C&S; returns ``(RunReport, [EpochCostRecord, ...])``.

    ``pool`` is a bandit-mode ``PredictorPool`` or a list of streams (wrapped
    in one).  Exactly one prediction is read per round, always from the
    epoch's chosen predictor.
    """
    pool = _bandit_pool(pool)
    if pool.T != trace.T:
        raise ValidationError("predictor streams and trace differ in length")
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    schedule = EpochSchedule.default(trace.T, tau)
    core = SimCore(trace.n, trace.T, initial_cache.pages, promotion)
    requests = trace.requests.tolist()
    evictions: List = []
    records: List[EpochCostRecord] = []
    if schedule.count:
        bandit = make_learner(learner, pool.M, schedule.count, seed)
    for epoch, (first, last) in enumerate(schedule, start=1):
        j = bandit.choose()
        rec, ev = run_epoch(core, requests, first, last, pool.handle(j), epoch, j, schedule.tau)
        bandit.update(j, rec.F)
        records.append(rec)
        evictions.extend(ev)
    misses = [e is not None for e in evictions]
    rep = report_from_log(evictions, misses, core.cache, initial_cache.k, "scs")
    rep.details.update(tau=schedule.tau, epochs=schedule.count)
    return rep, records


def default_epsilon(T: int, k: int, M: int) -> float:
    if T <= 0 or M <= 1:
        return 0.0
    return min(0.2, math.sqrt(k * math.log(M) / T))


def multiplexer_run(trace: RequestTrace, pool, k: Optional[int] = None,
                    initial_cache: Optional[CacheState] = None, epsilon: Optional[float] = None,
                    seed: int = 0, loss_scale: Optional[float] = None,
                    promotion: str = PROMOTE_LE):
    """Follow one of ``M`` lockstep Sim instances at a time.

    Weights are multiplied by ``(1 - epsilon) ** (miss / loss_scale)`` each
    round (``loss_scale`` defaults to ``k``, the most a switch can cost).
    After each update the followed instance is kept with probability
    ``min(1, q_new / q_old)``, otherwise a new one is drawn from the positive
    part of ``q_new - q_old``.  Switching copies the new instance's cache
    immediately; every page fetched that way counts as a miss (``sync_cost``).
    """
    if isinstance(pool, PredictorPool):
        if pool.mode != FULL_INFORMATION:
            raise ValidationError("the multiplexer needs full-information access")
    else:
        pool = PredictorPool(list(pool), FULL_INFORMATION)
    if pool.T != trace.T:
        raise ValidationError("predictor streams and trace differ in length")
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    k = initial_cache.k
    M = pool.M
    if epsilon is None:
        epsilon = default_epsilon(trace.T, k, M)
    if not 0.0 <= epsilon < 0.25:
        raise ValidationError(f"epsilon must lie in [0, 1/4), got {epsilon}")
    scale = float(k if loss_scale is None else loss_scale)
    shrink = math.log1p(-epsilon) / scale
    gen = _rng.stream(seed, "multiplexer")
    cores = [SimCore(trace.n, trace.T, initial_cache.pages, promotion) for _ in range(M)]
    logw = np.zeros(M)
    q = np.full(M, 1.0 / M)
    cur = int(gen.choice(M, p=q))
    sim_costs = [0] * M
    evictions = [None] * trace.T
    misses = bytearray(trace.T)
    sync = 0
    switches = 0
    for t, page in enumerate(trace.body.tolist(), start=1):
        missed = np.zeros(M)
        for j, core in enumerate(cores):
            out, _ = core.serve(t, page, pool.query(j + 1, t))
            if out is not None:
                missed[j] = 1.0
                sim_costs[j] += 1
                if j == cur:
                    evictions[t - 1] = out
                    misses[t - 1] = 1
        if M == 1 or not missed.any():
            continue
        logw += shrink * missed
        w = np.exp(logw - logw.max())
        q_new = w / w.sum()
        if gen.random() >= min(1.0, q_new[cur] / q[cur]):
            gain = np.clip(q_new - q, 0.0, None)
            nxt = int(gen.choice(M, p=gain / gain.sum()))
            if nxt != cur:
                sync += len(cores[nxt].cache - cores[cur].cache)
                switches += 1
                cur = nxt
        q = q_new
    rep = report_from_log(evictions, misses, cores[cur].cache, k, "multiplexer", sync_cost=sync)
    rep.details.update(epsilon=epsilon, switches=switches, sim_costs=sim_costs, followed=cur + 1)
    return rep
