"""Plain-text file formats.

Traces are ``t,page`` CSV with an optional leading ``# n=<int>`` comment; the
virtual suffix is never written and is rebuilt on load.  Predictor files are
``t,predicted_nat`` (NAT) or ``t,predicted_page`` (explicit).  A bundle is a
directory of ``predictor_<j>.csv`` files plus ``manifest.json`` recording
``M``, the access mode, the prediction kind and a sha256 per file.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import RequestTrace, ValidationError, augment_sequence
from .predictors import (BANDIT, FULL_INFORMATION, ExplicitPredictionStream, NatPredictionStream,
                         PredictorPool)

PathLike = Union[str, os.PathLike]

TRACE_HEADER = ("t", "page")
NAT_HEADER = ("t", "predicted_nat")
EXPLICIT_HEADER = ("t", "predicted_page")
ROUND_DUMP_HEADER = ("t", "request", "miss", "evicted", "argmax_remedy")
EPOCH_DUMP_HEADER = ("epoch", "predictor", "f", "F", "evictions")
MANIFEST = "manifest.json"


def atomic_write_text(path: PathLike, text: str):
    """Write via a temporary sibling file and rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_table(path: PathLike, header: Tuple[str, str]):
    """Returns ``(column_2_values, n_from_comment_or_None)`` after checking ``t`` runs 1..T."""
    n = None
    values: List[int] = []
    path = Path(path)
    with path.open(newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            key, _, val = s[1:].strip().partition("=")
            if key.strip() == "n":
                try:
                    n = int(val)
                except ValueError:
                    raise ValidationError(f"{path}: bad n comment {s!r}") from None
            continue
        body.append(s)
    if not body:
        raise ValidationError(f"{path}: missing header line {','.join(header)}")
    rows = list(csv.reader(body))
    if tuple(c.strip() for c in rows[0]) != header:
        raise ValidationError(f"{path}: expected header {','.join(header)}, got {body[0]!r}")
    for lineno, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise ValidationError(f"{path}: row {lineno} should have 2 fields: {row}")
        try:
            t, v = int(row[0]), int(row[1])
        except ValueError:
            raise ValidationError(f"{path}: row {lineno} is not integer: {row}") from None
        if t != lineno:
            raise ValidationError(f"{path}: rounds must be 1..T contiguous, row {lineno} has t={t}")
        values.append(v)
    return np.asarray(values, dtype=np.int64), n


def _resolve_n(path, n_file, n_arg):
    if n_arg is not None and n_file is not None and n_arg != n_file:
        raise ValidationError(f"{path}: file says n={n_file} but n={n_arg} was given")
    n = n_arg if n_arg is not None else n_file
    if n is None:
        raise ValidationError(f"{path}: page-universe size unknown (no '# n=' comment, no n given)")
    return n


def write_trace(trace: RequestTrace, path: PathLike):
    rows = ((t, p) for t, p in enumerate(trace.body.tolist(), start=1))
    atomic_write_text(path, csv_text(TRACE_HEADER, rows, [f"n={trace.n}"]))


def read_trace(path: PathLike, n: Optional[int] = None) -> RequestTrace:
    raw, n_file = _read_table(path, TRACE_HEADER)
    n = _resolve_n(path, n_file, n)
    try:
        return augment_sequence(raw, n)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from None


def write_nat_stream(stream: NatPredictionStream, path: PathLike):
    rows = ((t, p) for t, p in enumerate(stream.values.tolist(), start=1))
    atomic_write_text(path, csv_text(NAT_HEADER, rows, [f"n={stream.n}"]))


def read_nat_stream(path: PathLike, n: Optional[int] = None) -> NatPredictionStream:
    vals, n_file = _read_table(path, NAT_HEADER)
    n = _resolve_n(path, n_file, n)
    try:
        return NatPredictionStream(vals, n, Path(path).stem)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from None


def write_explicit_stream(stream: ExplicitPredictionStream, path: PathLike):
    rows = ((t, p) for t, p in enumerate(stream.pages.tolist(), start=1))
    atomic_write_text(path, csv_text(EXPLICIT_HEADER, rows, [f"n={stream.n}"]))


def read_explicit_stream(path: PathLike, n: Optional[int] = None) -> ExplicitPredictionStream:
    vals, n_file = _read_table(path, EXPLICIT_HEADER)
    n = _resolve_n(path, n_file, n)
    try:
        return ExplicitPredictionStream(vals, n)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_bundle(streams: Sequence[Union[NatPredictionStream, ExplicitPredictionStream]],
                 directory: PathLike, mode: str = FULL_INFORMATION):
    if mode not in (FULL_INFORMATION, BANDIT):
        raise ValidationError(f"unknown access mode {mode!r}")
    if not streams:
        raise ValidationError("a bundle needs at least one predictor")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    explicit = isinstance(streams[0], ExplicitPredictionStream)
    files = {}
    for j, s in enumerate(streams, start=1):
        if isinstance(s, ExplicitPredictionStream) != explicit:
            raise ValidationError("a bundle cannot mix NAT and explicit predictors")
        p = directory / f"predictor_{j}.csv"
        (write_explicit_stream if explicit else write_nat_stream)(s, p)
        files[p.name] = _sha256(p)
    manifest = {"M": len(streams), "mode": mode, "kind": "explicit" if explicit else "nat",
                "n": int(streams[0].n), "files": files}
    atomic_write_text(directory / MANIFEST, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_bundle(directory: PathLike, n: Optional[int] = None, verify: bool = True):
    """Returns ``(streams, manifest)``; checksums are verified unless ``verify`` is false."""
    directory = Path(directory)
    mpath = directory / MANIFEST
    try:
        manifest = json.loads(mpath.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{mpath}: not valid JSON ({e})") from None
    M = manifest.get("M")
    if not isinstance(M, int) or M < 1:
        raise ValidationError(f"{mpath}: M must be a positive integer")
    if manifest.get("mode") not in (FULL_INFORMATION, BANDIT):
        raise ValidationError(f"{mpath}: unknown mode {manifest.get('mode')!r}")
    n = n if n is not None else manifest.get("n")
    reader = read_explicit_stream if manifest.get("kind") == "explicit" else read_nat_stream
    streams = []
    for j in range(1, M + 1):
        p = directory / f"predictor_{j}.csv"
        if verify:
            want = manifest.get("files", {}).get(p.name)
            if want is None:
                raise ValidationError(f"{mpath}: no checksum listed for {p.name}")
            if _sha256(p) != want:
                raise ValidationError(f"{p}: checksum mismatch")
        streams.append(reader(p, n))
    return streams, manifest


def bundle_pool(directory: PathLike, n: Optional[int] = None, mode: Optional[str] = None) -> PredictorPool:
    streams, manifest = read_bundle(directory, n)
    if manifest.get("kind") == "explicit":
        raise ValidationError("derive NAT streams before building a pool from explicit predictors")
    return PredictorPool(streams, mode or manifest["mode"])


def write_round_dump(rows: Iterable[Sequence], path: PathLike):
    out = ((t, r, m, "" if e is None else e, a) for t, r, m, e, a in rows)
    atomic_write_text(path, csv_text(ROUND_DUMP_HEADER, out))


def write_epoch_dump(records, path: PathLike):
    rows = ((r.epoch, r.predictor, r.f, fmt_float(r.F), r.evictions) for r in records)
    atomic_write_text(path, csv_text(EPOCH_DUMP_HEADER, rows))


def fmt_float(x: float) -> str:
    """Six significant digits, the pinned float format of every CSV."""
    return f"{x:.6g}"
