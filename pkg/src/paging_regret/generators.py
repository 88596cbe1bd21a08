"""Synthetic request traces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng as _rng
from .core import RequestTrace, ValidationError, augment_sequence

TRACE_KINDS = ("uniform", "cyclic", "zipf", "phased-adversarial")


@dataclass(frozen=True)
class TraceSpec:
    """What to generate.

    ``cyclic`` requests ``((t - 1) mod cycle) + 1``.  ``zipf`` draws page ``i``
    with probability proportional to ``i ** -zipf_s``.  ``phased-adversarial`` splits time
    into phases of ``phase_len`` rounds; each phase draws uniformly from a
    fresh random working set of ``working_set`` pages, so an online cache keeps
    being caught out at phase changes.
    """

    kind: str = "uniform"
    n: int = 10
    T: int = 100
    seed: int = 0
    cycle: Optional[int] = None
    zipf_s: float = 1.0
    working_set: Optional[int] = None
    phase_len: Optional[int] = None

    def __post_init__(self):
        if self.kind not in TRACE_KINDS:
            raise ValidationError(f"unknown trace kind {self.kind!r}")
        if self.n < 2 or self.T < 0:
            raise ValidationError("need n >= 2 and T >= 0")
        if self.cycle is not None and not 1 <= self.cycle <= self.n:
            raise ValidationError("cycle length must lie in [1, n]")
        if self.zipf_s < 0:
            raise ValidationError("zipf exponent must be non-negative")
        if self.working_set is not None and not 1 <= self.working_set <= self.n:
            raise ValidationError("working set must lie in [1, n]")
        if self.phase_len is not None and self.phase_len < 1:
            raise ValidationError("phase length must be positive")


def gen_trace(spec: TraceSpec) -> RequestTrace:
    n, T = spec.n, spec.T
    gen = _rng.stream(spec.seed, "trace")
    if spec.kind == "uniform":
        raw = gen.integers(1, n + 1, size=T)
    elif spec.kind == "cyclic":
        cycle = spec.cycle or n
        raw = np.arange(T) % cycle + 1
    elif spec.kind == "zipf":
        w = np.arange(1, n + 1, dtype=float) ** -spec.zipf_s
        raw = gen.choice(np.arange(1, n + 1), size=T, p=w / w.sum())
    else:
        ws = spec.working_set or max(2, n // 2)
        plen = spec.phase_len or 4 * n
        chunks = []
        for start in range(0, T, plen):
            members = gen.choice(np.arange(1, n + 1), size=ws, replace=False)
            chunks.append(gen.choice(members, size=min(plen, T - start)))
        raw = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
    return augment_sequence(np.asarray(raw, dtype=np.int64), n)
