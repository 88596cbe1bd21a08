"""Sim: Belady's rule run on remedy predictions instead of true arrival times.

The remedy table keeps one surrogate arrival time per page.  The page just
requested takes the fresh prediction.  A page whose surrogate has already
passed (``<= t``) and is not later than the requested page's previous
surrogate is promoted to the sentinel ``Z``.  Pages not requested since the
table was (re)started hold ``Z + 1``.  ``Z = T + n + 1``.
"""
from __future__ import annotations

import heapq
from typing import Callable, Optional

from .core import (CacheState, ContractViolation, RequestTrace, ValidationError, check_cache,
                   default_cache, report_from_log)
from .predictors import NatPredictionStream

PROMOTE_LE = "le"
PROMOTE_EQ = "eq"


class RemedyTable:
    """Per-page remedy predictions, advanced one round at a time.

    ``promotion="le"`` promotes expired pages with ``value <= t``;
    ``promotion="eq"`` only those with ``value == t``.
    """

    def __init__(self, n: int, T: int, promotion: str = PROMOTE_LE):
        if promotion not in (PROMOTE_LE, PROMOTE_EQ):
            raise ValidationError(f"unknown promotion rule {promotion!r}")
        self.n = n
        self.Z = T + n + 1
        self.promotion = promotion
        self.values = [self.Z + 1] * (n + 1)
        self.t = 0
        self._heap: list = []

    def __getitem__(self, page: int) -> int:
        return self.values[page]

    def snapshot(self):
        return tuple(self.values[1:])

    def restart(self, t: int, page: int, prediction: int):
        """First-round rule: only the requested page leaves ``Z + 1``."""
        self.values = [self.Z + 1] * (self.n + 1)
        self.values[page] = prediction
        self._heap = [(prediction, page)]
        self.t = t

    def step(self, t: int, page: int, prediction: int):
        if self.t == 0:
            self.restart(t, page, prediction)
            return
        if t != self.t + 1:
            raise ContractViolation(f"remedy table at round {self.t}, got round {t}")
        v = self.values
        Z = self.Z
        old = v[page]
        if old < Z:
            if self.promotion == PROMOTE_LE:
                limit = min(t, old)
                heap = self._heap
                while heap and heap[0][0] <= limit:
                    val, i = heapq.heappop(heap)
                    if i != page and v[i] == val:
                        v[i] = Z
            elif old >= t:
                for i in range(1, self.n + 1):
                    if v[i] == t and i != page:
                        v[i] = Z
        v[page] = prediction
        if self.promotion == PROMOTE_LE:
            heapq.heappush(self._heap, (prediction, page))
        self.t = t


def remedy_step(table: RemedyTable, t: int, requested: int, prediction: int) -> RemedyTable:
    """Advance ``table`` to round ``t`` in place and return it."""
    table.step(t, requested, prediction)
    return table


def _reader(predictor) -> Callable[[int], int]:
    if callable(predictor):
        return predictor
    if isinstance(predictor, NatPredictionStream):
        vals = predictor.values.tolist()
    else:
        vals = list(predictor)
    return lambda t: vals[t - 1]


class SimCore:
    """Cache plus remedy table; serves one round at a time.

    Shared by ``sim_run``, the epoch loop of S-C&S and the multiplexer.
    """

    def __init__(self, n: int, T: int, cache_pages, promotion: str = PROMOTE_LE):
        self.remedy = RemedyTable(n, T, promotion)
        self.cache = set(cache_pages)

    def victim(self) -> int:
        v = self.remedy.values
        return max(self.cache, key=lambda i: (v[i], -i))

    def serve(self, t: int, page: int, prediction: int, restart: bool = False):
        """Returns ``(evicted_page_or_None, remedy_of_page_before_round)``."""
        rem = self.remedy
        before = rem.values[page]
        if restart:
            rem.restart(t, page, prediction)
        else:
            rem.step(t, page, prediction)
        cache = self.cache
        if page in cache:
            return None, before
        v = rem.values
        out = max(cache, key=lambda i: (v[i], -i))
        cache.remove(out)
        cache.add(page)
        return out, before


def sim_run(trace: RequestTrace, predictor, k: Optional[int] = None,
            initial_cache: Optional[CacheState] = None, promotion: str = PROMOTE_LE,
            dump: Optional[list] = None, observer=None):
    """Run Sim on ``trace``.

    ``predictor`` is a ``NatPredictionStream``, a sequence of predictions or a
    callable ``t -> p_t`` (e.g. ``PredictorPool.handle(j)``); it is read
    exactly once per round.  The round-``t`` prediction only touches the
    requested page, which is never an eviction candidate in that round.

    ``dump`` (a list) receives ``(t, request, miss, evicted, argmax_remedy)``
    rows; ``observer(t, remedy_table)`` is called after every round.
    """
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    get = _reader(predictor)
    core = SimCore(trace.n, trace.T, initial_cache.pages, promotion)
    evictions = [None] * trace.T
    misses = bytearray(trace.T)
    for t, page in enumerate(trace.body.tolist(), start=1):
        out, _ = core.serve(t, page, get(t))
        if out is not None:
            evictions[t - 1] = out
            misses[t - 1] = 1
        if dump is not None:
            top = out if out is not None else core.victim()
            dump.append((t, page, int(out is not None), out, top))
        if observer is not None:
            observer(t, core.remedy)
    return report_from_log(evictions, misses, core.cache, initial_cache.k, "sim")
