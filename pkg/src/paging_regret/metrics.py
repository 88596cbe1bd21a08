"""Prediction-error measures for a single NAT predictor."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .core import NatTable, RequestTrace, ValidationError
from .predictors import ExplicitPredictionStream, NatPredictionStream


@dataclass(frozen=True)
class MetricsReport:
    error_rounds: int
    inverted_pairs: int
    inverted_rounds: int
    eta_refined: int
    l1: int

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def as_tuple(self):
        return astuple(self)


def count_weak_inversions(x) -> int:
    """Number of index pairs ``i < j`` with ``x[i] >= x[j]``.

    Bottom-up merge levels, each handled with one sort and one
    ``searchsorted`` over row-offset keys; O(N log^2 N) in numpy.
    """
    x = np.asarray(x, dtype=np.int64)
    N = x.size
    if N < 2:
        return 0
    ranks = np.unique(x, return_inverse=True)[1].astype(np.int64)
    size = 1 << (N - 1).bit_length()
    # distinct increasing pads never form a pair with anything
    vals = np.concatenate([ranks, N + 1 + np.arange(size - N, dtype=np.int64)])
    off = 4 * size
    total = 0
    w = 1
    while w < size:
        blocks = vals.reshape(-1, 2 * w)
        rows = blocks.shape[0]
        shift = (np.arange(rows, dtype=np.int64) * off)[:, None]
        left = np.sort(blocks[:, :w], axis=1) + shift
        right = blocks[:, w:] + shift
        below = np.searchsorted(left.ravel(), right.ravel(), side="left")
        below -= np.repeat(np.arange(rows, dtype=np.int64) * w, w)
        total += int((w - below).sum())
        w *= 2
    return total


def inverted_mask(true_nat: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Rounds that belong to at least one inverted pair."""
    a = np.asarray(true_nat, dtype=np.int64)
    p = np.asarray(pred, dtype=np.int64)
    if a.size < 2:
        return np.zeros(a.size, dtype=bool)
    order = np.argsort(a, kind="stable")
    ps = p[order]
    big = np.iinfo(np.int64).max
    later_min = np.minimum.accumulate(ps[::-1])[::-1]
    later_min = np.concatenate([later_min[1:], [big]])
    earlier_max = np.maximum.accumulate(ps)
    earlier_max = np.concatenate([[-big], earlier_max[:-1]])
    hit = (later_min <= ps) | (earlier_max >= ps)
    mask = np.zeros(a.size, dtype=bool)
    mask[order] = hit
    return mask


def _pair(trace: RequestTrace, nat, stream):
    # raw arrays are accepted unvalidated so out-of-window values can be scored
    p = stream.values if isinstance(stream, NatPredictionStream) else np.asarray(stream, dtype=np.int64)
    if p.size != trace.T:
        raise ValidationError("stream length differs from trace")
    if nat is None:
        nat = NatTable(trace)
    return nat.request_nats(), p


def compute_metrics(trace: RequestTrace, nat: NatTable | None,
                    stream: NatPredictionStream) -> MetricsReport:
    """All five error counts of ``stream`` against the true next arrivals.

    A pair of rounds is inverted when the round with the strictly smaller
    true NAT has a prediction at least as large as the other's.  True NATs of
    distinct rounds are always distinct, so the pair relation is unambiguous.
    """
    a, p = _pair(trace, nat, stream)
    err = a != p
    inv = inverted_mask(a, p)
    order = np.argsort(a, kind="stable")
    return MetricsReport(
        error_rounds=int(err.sum()),
        inverted_pairs=count_weak_inversions(p[order]),
        inverted_rounds=int(inv.sum()),
        eta_refined=int((err & inv).sum()),
        l1=int(np.abs(p - a).sum()),
    )


def refined_eta(trace: RequestTrace, nat: NatTable | None, stream: NatPredictionStream) -> int:
    """Erroneous rounds that take part in an inverted pair."""
    a, p = _pair(trace, nat, stream)
    return int(((a != p) & inverted_mask(a, p)).sum())


def error_rounds(trace: RequestTrace, nat: NatTable | None, stream: NatPredictionStream) -> int:
    a, p = _pair(trace, nat, stream)
    return int((a != p).sum())


def compute_explicit_error(explicit: ExplicitPredictionStream, trace: RequestTrace) -> int:
    if explicit.T != trace.T:
        raise ValidationError("explicit stream length differs from trace")
    return int((explicit.pages != trace.body).sum())
