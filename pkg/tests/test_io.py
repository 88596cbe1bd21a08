import json

import numpy as np
import pytest

from paging_regret.combiners import scs_run
from paging_regret.core import ValidationError, augment_sequence
from paging_regret.io import (bundle_pool, read_bundle, read_explicit_stream, read_nat_stream,
                              read_trace, write_bundle, write_epoch_dump, write_explicit_stream,
                              write_nat_stream, write_round_dump, write_trace)
from paging_regret.predictors import ExplicitPredictionStream, perfect_nat, uniform_noise
from paging_regret.sim import sim_run


@pytest.fixture
def trace():
    return augment_sequence(np.random.default_rng(0).integers(1, 6, 40), 5)


def test_trace_round_trip(tmp_path, trace):
    p = tmp_path / "t.csv"
    write_trace(trace, p)
    text = p.read_text().splitlines()
    assert text[:3] == ["# n=5", "t,page", f"1,{trace.page(1)}"]
    back = read_trace(p)
    assert np.array_equal(back.requests, trace.requests)


def test_trace_needs_n(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("t,page\n1,2\n2,1\n")
    with pytest.raises(ValidationError):
        read_trace(p)
    assert read_trace(p, n=3).requests.tolist() == [2, 1, 1, 2, 3]
    p.write_text("# n=4\nt,page\n1,2\n")
    with pytest.raises(ValidationError):
        read_trace(p, n=3)


@pytest.mark.parametrize("body", [
    "t,page\n1,2\n3,1\n",      # gap
    "t,page\n2,1\n",           # does not start at 1
    "t,request\n1,1\n",        # wrong header
    "t,page\n1,x\n",           # not an integer
    "t,page\n1,9\n",           # page out of range
    "",                        # empty
])
def test_bad_trace_files(tmp_path, body):
    p = tmp_path / "t.csv"
    p.write_text(body)
    with pytest.raises(ValidationError):
        read_trace(p, n=3)


def test_stream_round_trips(tmp_path, trace):
    s = perfect_nat(trace)
    write_nat_stream(s, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[1] == "t,predicted_nat"
    assert np.array_equal(read_nat_stream(tmp_path / "p.csv").values, s.values)
    e = ExplicitPredictionStream(trace.body, 5)
    write_explicit_stream(e, tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text().splitlines()[1] == "t,predicted_page"
    assert np.array_equal(read_explicit_stream(tmp_path / "e.csv").pages, e.pages)


def test_nat_file_window_checked(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("# n=2\nt,predicted_nat\n1,1\n")
    with pytest.raises(ValidationError):
        read_nat_stream(p)


def test_bundle_round_trip_and_checksums(tmp_path, trace):
    streams = [perfect_nat(trace), uniform_noise(trace, 1)]
    d = tmp_path / "b"
    m = write_bundle(streams, d, "bandit")
    assert m["M"] == 2 and m["mode"] == "bandit" and len(m["files"]) == 2
    back, manifest = read_bundle(d)
    assert all(np.array_equal(a.values, b.values) for a, b in zip(back, streams))
    pool = bundle_pool(d)
    assert pool.mode == "bandit" and pool.M == 2
    scs_run(trace, pool, k=2)
    (d / "predictor_2.csv").write_text((d / "predictor_2.csv").read_text().replace(",", ";", 1))
    with pytest.raises(ValidationError):
        read_bundle(d)


def test_bundle_manifest_checked(tmp_path, trace):
    d = tmp_path / "b"
    write_bundle([perfect_nat(trace)], d)
    m = json.loads((d / "manifest.json").read_text())
    m["M"] = 0
    (d / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(ValidationError):
        read_bundle(d)


def test_dumps(tmp_path, trace):
    rows = []
    sim_run(trace, perfect_nat(trace), k=2, dump=rows)
    write_round_dump(rows, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "t,request,miss,evicted,argmax_remedy"
    assert len(lines) == trace.T + 1
    _, recs = scs_run(trace, [perfect_nat(trace)], k=2, tau=7)
    write_epoch_dump(recs, tmp_path / "e.csv")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "epoch,predictor,f,F,evictions"
    assert len(lines) == 1 + len(recs)
    assert lines[1].split(",")[3] == f"{recs[0].F:.6g}"
