"""Request traces, next-arrival-time tables, caches and run reports.

Pages are integers in ``[1, n]`` and rounds are integers in ``[1, T]``.  Every
trace carries ``n`` virtual requests after round ``T`` (round ``T + i``
requests page ``i``) so that every page has a finite next arrival time.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class ValidationError(ValueError):
    """Bad user input (page ids out of range, inconsistent sizes, ...)."""


class ContractViolation(RuntimeError):
    """A caller broke a call-order or state contract."""


class AccessViolation(ContractViolation):
    """A predictor was read in a way the access model forbids."""


@dataclass(frozen=True)
class RequestTrace:
    """A request sequence augmented with its virtual suffix.

    ``requests`` holds ``T + n`` page ids; ``requests[t - 1]`` is the request of
    round ``t``.
    """

    n: int
    T: int
    requests: np.ndarray = field(repr=False)

    def __post_init__(self):
        req = np.asarray(self.requests, dtype=np.int64)
        if self.n < 1 or self.T < 0:
            raise ValidationError(f"bad trace sizes n={self.n}, T={self.T}")
        if req.shape != (self.T + self.n,):
            raise ValidationError("requests must have length T + n")
        if req.size and (req.min() < 1 or req.max() > self.n):
            raise ValidationError("page id out of range [1, n]")
        if not np.array_equal(req[self.T:], np.arange(1, self.n + 1)):
            raise ValidationError("virtual suffix must be 1, ..., n")
        req.setflags(write=False)
        object.__setattr__(self, "requests", req)

    @property
    def body(self) -> np.ndarray:
        """The real requests, rounds 1..T."""
        return self.requests[: self.T]

    def page(self, t: int) -> int:
        return int(self.requests[t - 1])

    def __len__(self):
        return self.T


def augment_sequence(raw: Iterable[int], n: int) -> RequestTrace:
    """Append the virtual suffix ``1, ..., n`` to ``raw``."""
    if n < 2:
        raise ValidationError("need n >= 2")
    body = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw,
                      dtype=np.int64).reshape(-1)
    if body.size and (body.min() < 1 or body.max() > n):
        bad = body[(body < 1) | (body > n)][0]
        raise ValidationError(f"page id {int(bad)} outside [1, {n}]")
    return RequestTrace(n=n, T=int(body.size),
                        requests=np.concatenate([body, np.arange(1, n + 1)]))


class NatTable:
    """Next arrival times ``A(t, i)`` of a trace.

    Built once in a single pass.  ``next_of_request[t]`` is ``A(t, sigma_t)``
    (index 0 unused) and ``first_arrival[i]`` is ``A(0, i)``; general lookups
    ``A(t, i)`` go through per-page occurrence lists.
    """

    def __init__(self, trace: RequestTrace):
        self.trace = trace
        n, T = trace.n, trace.T
        req = trace.requests
        L = T + n
        # stable sort groups positions of each page in increasing order
        order = np.argsort(req, kind="stable")
        nxt = np.zeros(L + 1, dtype=np.int64)
        same = req[order[:-1]] == req[order[1:]]
        nxt[order[:-1][same] + 1] = order[1:][same] + 1
        self.next_of_request = nxt
        starts = np.ones(L, dtype=bool)
        starts[1:] = ~same
        first = np.zeros(n + 1, dtype=np.int64)
        first[req[order[starts]]] = order[starts] + 1
        self.first_arrival = first
        self._order = order
        self._occ: Optional[list] = None

    def _occurrences(self):
        if self._occ is None:
            req = self.trace.requests
            bounds = np.searchsorted(req[self._order], np.arange(1, self.trace.n + 2))
            pos = (self._order + 1).tolist()
            self._occ = [None] + [pos[bounds[i - 1]:bounds[i]]
                                  for i in range(1, self.trace.n + 1)]
        return self._occ

    def __call__(self, t: int, i: int) -> int:
        """``A(t, i)``: first round after ``t`` requesting page ``i``."""
        if not 0 <= t <= self.trace.T:
            raise ValidationError(f"round {t} outside [0, T]")
        if t == 0:
            return int(self.first_arrival[i])
        if self.trace.page(t) == i:
            return int(self.next_of_request[t])
        occ = self._occurrences()[i]
        return occ[bisect_right(occ, t)]

    def request_nats(self) -> np.ndarray:
        """``A(t, sigma_t)`` for ``t = 1..T`` as an array of length ``T``."""
        return self.next_of_request[1 : self.trace.T + 1].copy()


def build_nat_table(trace: RequestTrace) -> NatTable:
    return NatTable(trace)


@dataclass(frozen=True)
class CacheState:
    k: int
    pages: frozenset

    def __post_init__(self):
        pages = frozenset(int(p) for p in self.pages)
        if len(pages) != self.k:
            raise ValidationError(f"cache must hold exactly k={self.k} distinct pages")
        object.__setattr__(self, "pages", pages)

    def __contains__(self, page):
        return page in self.pages

    def __iter__(self):
        return iter(sorted(self.pages))

    def __len__(self):
        return self.k


def make_cache(pages: Iterable[int], k: Optional[int] = None, n: Optional[int] = None) -> CacheState:
    pages = frozenset(int(p) for p in pages)
    if k is None:
        k = len(pages)
    if n is not None:
        if not 1 <= k < n:
            raise ValidationError(f"need 1 <= k < n, got k={k}, n={n}")
        if any(not 1 <= p <= n for p in pages):
            raise ValidationError("cached page outside [1, n]")
    return CacheState(k, pages)


def default_cache(k: int, n: Optional[int] = None) -> CacheState:
    """The deterministic default initial cache ``{1, ..., k}``."""
    if n is not None and not 1 <= k < n:
        raise ValidationError(f"need 1 <= k < n, got k={k}, n={n}")
    return CacheState(k, frozenset(range(1, k + 1)))


def check_cache(cache: CacheState, trace: RequestTrace) -> CacheState:
    if not 1 <= cache.k < trace.n:
        raise ValidationError(f"need 1 <= k < n, got k={cache.k}, n={trace.n}")
    if any(not 1 <= p <= trace.n for p in cache.pages):
        raise ValidationError("cached page outside [1, n]")
    return cache


def serve(cache: CacheState, page: int, evict_choice: Optional[int] = None):
    """Serve one request lazily.

    Returns ``(miss, new_cache)``.  A hit must come with ``evict_choice=None``;
    a miss must name a page currently cached.
    """
    if page in cache.pages:
        if evict_choice is not None:
            raise ContractViolation(f"eviction of {evict_choice} requested on a hit")
        return False, cache
    if evict_choice is None or evict_choice not in cache.pages:
        raise ContractViolation(f"evictee {evict_choice} is not in the cache")
    return True, CacheState(cache.k, (cache.pages - {evict_choice}) | {page})


@dataclass
class RunReport:
    """Outcome of one algorithm on one trace."""

    cost: int
    evictions: list
    final_cache: CacheState
    per_round_miss: np.ndarray
    algorithm: str = ""
    # pages fetched outside request service (multiplexer cache syncs)
    sync_cost: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.per_round_miss = np.asarray(self.per_round_miss, dtype=np.uint8)
        if int(self.per_round_miss.sum()) + self.sync_cost != self.cost:
            raise ContractViolation("cost disagrees with per-round misses")
        for t, e in enumerate(self.evictions):
            if e is not None and not self.per_round_miss[t]:
                raise ContractViolation(f"eviction without a miss at round {t + 1}")

    @property
    def T(self) -> int:
        return len(self.evictions)


def report_from_log(evictions: Sequence[Optional[int]], misses, cache_pages, k: int,
                    algorithm: str = "", sync_cost: int = 0) -> RunReport:
    misses = np.asarray(misses, dtype=np.uint8)
    return RunReport(cost=int(misses.sum()) + sync_cost, evictions=list(evictions),
                     final_cache=CacheState(k, frozenset(cache_pages)),
                     per_round_miss=misses, algorithm=algorithm, sync_cost=sync_cost)
