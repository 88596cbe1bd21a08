"""Experiment sweeps, their config format and the random-trace lower-bound study.

Config files are flat ``key = value`` text with ``#`` comments::

    # regret of S-C&S against ten predictors
    trace = uniform          # uniform | cyclic | zipf | phased-adversarial
    n = 50
    T = 4096
    k = 10
    M = 10
    good = 1                 # index of the well-behaved predictor
    good_model = uniform     # injection applied to it (rate 0 = perfect)
    good_rate = 0
    noise_model = uniform    # injection applied to every other predictor
    noise_rate = 1
    algorithm = scs          # fitf | dp-opt | lru | sim | scs | multiplexer
    seeds = 0-19             # list "0,3,7", range "0-19" or a mix
    out = results.csv

Optional keys: ``cycle``, ``zipf_s``, ``working_set``, ``phase_len``,
``good_shift``, ``noise_shift``, ``tau``, ``epsilon``, ``learner``,
``promotion``, ``record_wall_time``.

The CSV columns are ``seed,algorithm,T,k,M,cost,opt,regret,eta_min`` in that
order, plus ``wall_time`` when ``record_wall_time = true``.  Wall time is left
out by default so repeated runs produce byte-identical files.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .combiners import multiplexer_run, scs_run
from .core import NatTable, RequestTrace, ValidationError, default_cache
from .generators import TRACE_KINDS, TraceSpec, gen_trace
from .io import atomic_write_text, csv_text, fmt_float
from .metrics import refined_eta
from .offline import dp_opt, fitf_run, lru_run
from .predictors import (INJECTION_MODELS, MODEL_ALIASES, ErrorInjection, NatPredictionStream,
                         inject_errors, perfect_nat)
from .sim import PROMOTE_EQ, PROMOTE_LE, sim_run

ALGORITHMS = ("fitf", "dp-opt", "lru", "sim", "scs", "multiplexer")
RESULT_COLUMNS = ("seed", "algorithm", "T", "k", "M", "cost", "opt", "regret", "eta_min")


def parse_seeds(text: str) -> Tuple[int, ...]:
    seeds: List[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if b < a:
                    raise ValidationError(f"empty seed range {part!r}")
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ValidationError(f"bad seed entry {part!r}") from None
    if not seeds:
        raise ValidationError("no seeds given")
    return tuple(seeds)


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "none", "default") else int(text)


def _opt_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none", "default") else float(text)


@dataclass(frozen=True)
class ExperimentConfig:
    trace: str = "uniform"
    n: int = 10
    T: int = 1000
    cycle: Optional[int] = None
    zipf_s: float = 1.0
    working_set: Optional[int] = None
    phase_len: Optional[int] = None
    k: int = 3
    M: int = 1
    good: int = 1
    good_model: str = "uniform"
    good_rate: float = 0.0
    good_shift: int = 0
    noise_model: str = "uniform"
    noise_rate: float = 1.0
    noise_shift: int = 0
    algorithm: str = "sim"
    tau: Optional[int] = None
    epsilon: Optional[float] = None
    learner: str = "inf"
    promotion: str = PROMOTE_LE
    seeds: Tuple[int, ...] = (0,)
    out: Optional[str] = None
    record_wall_time: bool = False

    def __post_init__(self):
        if self.trace not in TRACE_KINDS:
            raise ValidationError(f"unknown trace kind {self.trace!r}")
        if not 1 <= self.k < self.n:
            raise ValidationError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if self.M < 1:
            raise ValidationError("need M >= 1")
        if not 1 <= self.good <= self.M:
            raise ValidationError(f"good predictor {self.good} outside [1, {self.M}]")
        for m in (self.good_model, self.noise_model):
            if MODEL_ALIASES.get(m, m) not in INJECTION_MODELS:
                raise ValidationError(f"unknown injection model {m!r}")
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm {self.algorithm!r}")
        if self.promotion not in (PROMOTE_LE, PROMOTE_EQ):
            raise ValidationError(f"unknown promotion rule {self.promotion!r}")
        if not self.seeds:
            raise ValidationError("no seeds given")

    def trace_spec(self, seed: int) -> TraceSpec:
        return TraceSpec(self.trace, self.n, self.T, seed, self.cycle, self.zipf_s,
                         self.working_set, self.phase_len)

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        conv = {
            "trace": str, "n": int, "T": int, "cycle": _opt_int, "zipf_s": float,
            "working_set": _opt_int, "phase_len": _opt_int, "k": int, "M": int, "good": int,
            "good_model": str, "good_rate": float, "good_shift": int, "noise_model": str,
            "noise_rate": float, "noise_shift": int, "algorithm": str, "tau": _opt_int,
            "epsilon": _opt_float, "learner": str, "promotion": str, "seeds": parse_seeds,
            "out": str, "record_wall_time": _bool,
        }
        assert set(conv) == {f.name for f in fields(cls)}
        values = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            key, sep, val = s.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or not key:
                raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
            if key not in conv:
                raise ValidationError(f"{source}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ValidationError(f"{source}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = conv[key](val)
            except ValueError as e:
                raise ValidationError(f"{source}:{lineno}: bad value for {key}: {e}") from None
        try:
            return cls(**values)
        except ValidationError as e:
            raise ValidationError(f"{source}: {e}") from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), str(path))


@dataclass(frozen=True)
class ResultRow:
    seed: int
    algorithm: str
    T: int
    k: int
    M: int
    cost: int
    opt: int
    regret: int
    eta_min: int
    wall_time: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.regret != self.cost - self.opt:
            raise ValidationError("regret must equal cost - opt")

    def cells(self, wall_time: bool = False) -> tuple:
        base = (self.seed, self.algorithm, self.T, self.k, self.M, self.cost, self.opt,
                self.regret, self.eta_min)
        return base + (fmt_float(self.wall_time),) if wall_time else base


def build_predictors(cfg: ExperimentConfig, trace: RequestTrace, nat: NatTable,
                     seed: int) -> List[NatPredictionStream]:
    """Predictor ``good`` gets the good injection, every other one the noise injection.

    Each predictor draws from its own stream, so adding predictors never
    changes the existing ones.
    """
    clean = perfect_nat(trace, nat)
    out = []
    for j in range(1, cfg.M + 1):
        if j == cfg.good:
            inj = ErrorInjection(cfg.good_model, cfg.good_rate, seed, cfg.good_shift)
        else:
            inj = ErrorInjection(cfg.noise_model, cfg.noise_rate, seed, cfg.noise_shift)
        out.append(inject_errors(clean, inj, trace, f"predictor:{j}"))
    return out


def run_algorithm(cfg: ExperimentConfig, trace: RequestTrace, nat: NatTable, streams,
                  seed: int) -> int:
    cache = default_cache(cfg.k, cfg.n)
    algo = cfg.algorithm
    if algo == "fitf":
        return fitf_run(trace, nat, initial_cache=cache).cost
    if algo == "dp-opt":
        return dp_opt(trace, initial_cache=cache).cost
    if algo == "lru":
        return lru_run(trace, initial_cache=cache).cost
    if algo == "sim":
        return sim_run(trace, streams[cfg.good - 1], initial_cache=cache,
                       promotion=cfg.promotion).cost
    if algo == "scs":
        rep, _ = scs_run(trace, streams, initial_cache=cache, tau=cfg.tau, seed=seed,
                         learner=cfg.learner, promotion=cfg.promotion)
        return rep.cost
    return multiplexer_run(trace, streams, initial_cache=cache, epsilon=cfg.epsilon, seed=seed,
                           promotion=cfg.promotion).cost


def run_seed(cfg: ExperimentConfig, seed: int) -> ResultRow:
    start = time.perf_counter()
    trace = gen_trace(cfg.trace_spec(seed))
    nat = NatTable(trace)
    streams = build_predictors(cfg, trace, nat, seed)
    cost = run_algorithm(cfg, trace, nat, streams, seed)
    opt = fitf_run(trace, nat, initial_cache=default_cache(cfg.k, cfg.n)).cost
    eta_min = min(refined_eta(trace, nat, s) for s in streams)
    return ResultRow(seed, cfg.algorithm, cfg.T, cfg.k, cfg.M, cost, opt, cost - opt, eta_min,
                     time.perf_counter() - start)


def results_csv(rows: List[ResultRow], wall_time: bool = False) -> str:
    header = RESULT_COLUMNS + (("wall_time",) if wall_time else ())
    return csv_text(header, (r.cells(wall_time) for r in rows))


def run_experiment(cfg: ExperimentConfig, out=None) -> List[ResultRow]:
    """One row per seed, in seed-list order; the CSV goes to ``out`` (or ``cfg.out``)."""
    rows = [run_seed(cfg, s) for s in cfg.seeds]
    target = out if out is not None else cfg.out
    if target is not None:
        try:
            atomic_write_text(target, results_csv(rows, cfg.record_wall_time))
        except OSError as e:
            raise OSError(f"cannot write results to {target}: {e}") from e
    return rows


# --- random traces with n = k + 1 -------------------------------------------------

@dataclass(frozen=True)
class LowerBoundSeed:
    seed: int
    phases: int
    mean_phase_length: float
    max_fitf_misses_per_phase: int
    fitf_cost: int
    lru_cost: int


@dataclass(frozen=True)
class LowerBoundSummary:
    k: int
    n: int
    T: int
    per_seed: Tuple[LowerBoundSeed, ...]
    mean_phase_length: float
    expected_phase_length: float
    max_fitf_misses_per_phase: int
    fitf_cost: float
    lru_cost: float

    @property
    def lru_ratio(self) -> float:
        return self.lru_cost / self.fitf_cost if self.fitf_cost else math.inf


def harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def phase_ends(body: np.ndarray, n: int) -> List[int]:
    """0-based end index of each complete phase.

    A phase is the shortest run of rounds, starting where the previous one
    ended, that requests every one of the ``n`` pages.
    """
    ends = []
    seen = np.zeros(n + 1, dtype=bool)
    count = 0
    for idx, p in enumerate(body.tolist()):
        if not seen[p]:
            seen[p] = True
            count += 1
            if count == n:
                ends.append(idx)
                seen[:] = False
                count = 0
    return ends


def lower_bound_seed(k: int, T: int, seed: int) -> LowerBoundSeed:
    n = k + 1
    trace = gen_trace(TraceSpec("uniform", n, T, seed))
    cache = default_cache(k, n)
    fitf = fitf_run(trace, initial_cache=cache)
    lru = lru_run(trace, initial_cache=cache)
    ends = phase_ends(trace.body, n)
    miss = fitf.per_round_miss.astype(np.int64)
    worst = 0
    start = 0
    for e in ends:
        worst = max(worst, int(miss[start:e + 1].sum()))
        start = e + 1
    mean_len = (ends[-1] + 1) / len(ends) if ends else math.nan
    return LowerBoundSeed(seed, len(ends), mean_len, worst, fitf.cost, lru.cost)


def lower_bound_experiment(k: int, T: int, seeds) -> LowerBoundSummary:
    """FitF against LRU on uniform traces over ``k + 1`` pages.

    Reports the mean phase length (coupon-collector time ``n * H_n``), the
    most FitF misses in any complete phase, and both costs averaged over seeds.
    """
    if k < 1:
        raise ValidationError("need k >= 1")
    per = tuple(lower_bound_seed(k, T, s) for s in seeds)
    if not per:
        raise ValidationError("no seeds given")
    total_phases = sum(p.phases for p in per)
    mean_len = (math.fsum(p.mean_phase_length * p.phases for p in per) / total_phases
                if total_phases else math.nan)
    return LowerBoundSummary(
        k=k, n=k + 1, T=T, per_seed=per,
        mean_phase_length=mean_len,
        expected_phase_length=(k + 1) * harmonic(k + 1),
        max_fitf_misses_per_phase=max(p.max_fitf_misses_per_phase for p in per),
        fitf_cost=float(np.mean([p.fitf_cost for p in per])),
        lru_cost=float(np.mean([p.lru_cost for p in per])),
    )
