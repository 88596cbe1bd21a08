"""Prediction streams, consistent NAT derivation, error injection and the
access-controlled predictor pool."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from . import rng as _rng
from .core import AccessViolation, NatTable, RequestTrace, ValidationError

FULL_INFORMATION = "full"
BANDIT = "bandit"
INJECTION_MODELS = ("offset", "uniform", "swap")
MODEL_ALIASES = {"uniform-resample": "uniform", "adversarial-swap": "swap"}


@dataclass(frozen=True)
class NatPredictionStream:
    """Predicted next arrival ``p_t`` of the page requested at round ``t``.

    ``values[t - 1]`` is ``p_t`` and must lie in ``(t, T + n]``.
    """

    values: np.ndarray = field(repr=False)
    n: int
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64).reshape(-1)
        T = v.size
        rounds = np.arange(1, T + 1)
        if T and ((v <= rounds).any() or (v > T + self.n).any()):
            t = int(np.flatnonzero((v <= rounds) | (v > T + self.n))[0]) + 1
            raise ValidationError(f"prediction {int(v[t - 1])} at round {t} outside ({t}, {T + self.n}]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return int(self.values.size)

    def __getitem__(self, t: int) -> int:
        return int(self.values[t - 1])

    def __len__(self):
        return self.T


@dataclass(frozen=True)
class ExplicitPredictionStream:
    """Predicted page ``pi_t`` for every round; the suffix ``pi_{T+i} = i`` is implied."""

    pages: np.ndarray = field(repr=False)
    n: int

    def __post_init__(self):
        p = np.asarray(self.pages, dtype=np.int64).reshape(-1)
        if p.size and (p.min() < 1 or p.max() > self.n):
            raise ValidationError("predicted page outside [1, n]")
        p.setflags(write=False)
        object.__setattr__(self, "pages", p)

    @property
    def T(self) -> int:
        return int(self.pages.size)

    @property
    def augmented(self) -> np.ndarray:
        return np.concatenate([self.pages, np.arange(1, self.n + 1)])


def perfect_nat(trace: RequestTrace, nat: NatTable | None = None) -> NatPredictionStream:
    if nat is None:
        nat = NatTable(trace)
    return NatPredictionStream(nat.request_nats(), trace.n, "perfect")


def derive_consistent_nat(explicit: ExplicitPredictionStream, trace: RequestTrace) -> NatPredictionStream:
    """``p_t = min{t' > t : pi_{t'} = sigma_t}`` over the augmented ``pi``."""
    if explicit.T != trace.T or explicit.n != trace.n:
        raise ValidationError("explicit stream and trace disagree on T or n")
    T, n = trace.T, trace.n
    pi = explicit.augmented.tolist()
    sigma = trace.requests.tolist()
    upcoming = [0] * (n + 1)
    for s in range(T + n, T, -1):
        upcoming[pi[s - 1]] = s
    out = [0] * T
    for t in range(T, 0, -1):
        out[t - 1] = upcoming[sigma[t - 1]]
        upcoming[pi[t - 1]] = t
    return NatPredictionStream(np.array(out, dtype=np.int64), n, "consistent")


@dataclass(frozen=True)
class ErrorInjection:
    """How to corrupt a clean NAT stream.

    ``offset`` adds ``shift``; ``uniform`` redraws uniformly from the legal
    window; ``swap`` reflects the prediction inside the window ``(t, T + n]``,
    so near arrivals become far ones and vice versa.  Results are always
    clamped into ``(t, T + n]``.
    """

    model: str = "uniform"
    rate: float = 0.0
    seed: int = 0
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", MODEL_ALIASES.get(self.model, self.model))
        if self.model not in INJECTION_MODELS:
            raise ValidationError(f"unknown injection model {self.model!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValidationError("injection rate must lie in [0, 1]")


def inject_errors(clean: NatPredictionStream, cfg: ErrorInjection, trace: RequestTrace,
                  component: str = "inject") -> NatPredictionStream:
    T, n = trace.T, trace.n
    if clean.T != T:
        raise ValidationError("stream length differs from trace")
    gen = _rng.stream(cfg.seed, component)
    corrupt = gen.random(T) < cfg.rate
    lo = np.arange(2, T + 2, dtype=np.int64)
    hi = T + n
    p = clean.values.copy()
    if cfg.model == "offset":
        q = p + cfg.shift
    elif cfg.model == "uniform":
        q = gen.integers(lo, hi + 1)
    else:
        q = lo + hi - p
    p[corrupt] = np.clip(q, lo, hi)[corrupt]
    return NatPredictionStream(p, n, f"{clean.name}+{cfg.model}@{cfg.rate:g}")


def uniform_noise(trace: RequestTrace, seed: int, component: str = "noise") -> NatPredictionStream:
    """A predictor that is wrong almost everywhere (rate-1 uniform resample)."""
    clean = NatPredictionStream(np.arange(2, trace.T + 2), trace.n)
    return inject_errors(clean, ErrorInjection("uniform", 1.0, seed), trace, component)


class PredictorPool:
    """Mediates every predictor read.

    Reads must move forward in time.  In bandit mode at most one predictor
    may be read per round; breaking either rule raises ``AccessViolation``.
    """

    def __init__(self, streams: Sequence[NatPredictionStream], mode: str = FULL_INFORMATION):
        if mode not in (FULL_INFORMATION, BANDIT):
            raise ValidationError(f"unknown access mode {mode!r}")
        if not streams:
            raise ValidationError("need at least one predictor")
        T = streams[0].T
        if any(s.T != T for s in streams):
            raise ValidationError("predictor streams differ in length")
        self._values = [s.values.tolist() for s in streams]
        self.M = len(streams)
        self.T = T
        self.mode = mode
        self.query_log: List[Tuple[int, int]] = []
        self._round = 0

    def query(self, j: int, t: int) -> int:
        if not 1 <= j <= self.M:
            raise ValidationError(f"predictor {j} outside [1, {self.M}]")
        if not 1 <= t <= self.T:
            raise ValidationError(f"round {t} outside [1, {self.T}]")
        if t < self._round:
            raise AccessViolation(f"round {t} is in the past (now {self._round})")
        if t == self._round and self.mode == BANDIT:
            raise AccessViolation(f"second query in round {t} under bandit access")
        self._round = t
        self.query_log.append((j, t))
        return self._values[j - 1][t - 1]

    def handle(self, j: int):
        """Callable ``t -> p_t`` reading predictor ``j`` through the pool."""
        return lambda t: self.query(j, t)


def pool_query(pool: PredictorPool, j: int, t: int) -> int:
    return pool.query(j, t)
