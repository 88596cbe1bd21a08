"""Offline optimum (furthest-in-the-future) and an exhaustive DP check on it."""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

from .core import (CacheState, NatTable, RequestTrace, ValidationError, check_cache,
                   default_cache, report_from_log)

DP_GUARD = 10**7


class InstanceTooLarge(ValidationError):
    pass


@dataclass(frozen=True)
class OptReport:
    cost: int
    # eviction schedule (page or None per round); only FitF provides one
    witness: Optional[tuple] = None


def fitf_run(trace: RequestTrace, nat: Optional[NatTable] = None, k: Optional[int] = None,
             initial_cache: Optional[CacheState] = None):
    """Belady's rule: on a miss evict the cached page requested furthest ahead.

    Distinct pages never share a next arrival time, so the smallest-page-id
    tie-break never actually fires.
    """
    if nat is None:
        nat = NatTable(trace)
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    k = initial_cache.k
    req = trace.requests.tolist()
    nxt = nat.next_of_request.tolist()
    first = nat.first_arrival.tolist()
    # next arrival of every cached page, kept current
    arrival = {p: first[p] for p in initial_cache.pages}
    evictions = [None] * trace.T
    misses = bytearray(trace.T)
    for t in range(1, trace.T + 1):
        page = req[t - 1]
        if page not in arrival:
            victim = max(arrival, key=lambda q: (arrival[q], -q))
            del arrival[victim]
            evictions[t - 1] = victim
            misses[t - 1] = 1
        arrival[page] = nxt[t]
    return report_from_log(evictions, misses, arrival.keys(), k, "fitf")


def fitf_opt(trace: RequestTrace, initial_cache: CacheState, nat: Optional[NatTable] = None) -> OptReport:
    rep = fitf_run(trace, nat, initial_cache=initial_cache)
    return OptReport(rep.cost, tuple(rep.evictions))


def _check_guard(n: int, k: int, T: int):
    if comb(n, k) * max(T, 1) > DP_GUARD:
        raise InstanceTooLarge(f"C({n},{k}) * T exceeds {DP_GUARD}")


def dp_opt(trace: RequestTrace, k: Optional[int] = None,
           initial_cache: Optional[CacheState] = None) -> OptReport:
    """Exact minimum miss count over all lazy schedules, by forward DP over
    cache configurations (k-subsets encoded as bitmasks)."""
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    k = initial_cache.k
    _check_guard(trace.n, k, trace.T)
    start = 0
    for p in initial_cache.pages:
        start |= 1 << p
    best = {start: 0}
    for page in trace.body.tolist():
        bit = 1 << page
        nxt = {}
        for mask, c in best.items():
            if mask & bit:
                if c < nxt.get(mask, c + 1):
                    nxt[mask] = c
                continue
            m = mask
            while m:
                low = m & -m
                m ^= low
                new = (mask ^ low) | bit
                if c + 1 < nxt.get(new, c + 2):
                    nxt[new] = c + 1
        best = nxt
    return OptReport(min(best.values()))


def all_configurations(n: int, k: int):
    return [frozenset(c) for c in combinations(range(1, n + 1), k)]


def lru_run(trace: RequestTrace, k: Optional[int] = None,
            initial_cache: Optional[CacheState] = None):
    """Least-recently-used; initial pages count as used in ascending id order."""
    if initial_cache is None:
        initial_cache = default_cache(k, trace.n)
    check_cache(initial_cache, trace)
    k = initial_cache.k
    cache = OrderedDict((p, None) for p in sorted(initial_cache.pages))
    evictions = [None] * trace.T
    misses = bytearray(trace.T)
    for t, page in enumerate(trace.body.tolist()):
        if page in cache:
            cache.move_to_end(page)
            continue
        victim, _ = cache.popitem(last=False)
        cache[page] = None
        evictions[t] = victim
        misses[t] = 1
    return report_from_log(evictions, misses, cache.keys(), k, "lru")
