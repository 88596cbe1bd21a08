import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paging_regret.combiners import (EpochSchedule, default_epsilon, epoch_cost, icbrt,
                                     multiplexer_run, run_epoch, scs_run)
from paging_regret.core import ValidationError, augment_sequence, default_cache, make_cache
from paging_regret.offline import fitf_run
from paging_regret.predictors import (BANDIT, FULL_INFORMATION, ErrorInjection, PredictorPool,
                                      inject_errors, perfect_nat, uniform_noise)
from paging_regret.sim import SimCore, sim_run


def random_case(seed, n=8, T=60, M=3):
    g = np.random.default_rng(seed)
    tr = augment_sequence(g.integers(1, n + 1, T), n)
    streams = [inject_errors(perfect_nat(tr), ErrorInjection("uniform", r, seed), tr, f"p{j}")
               for j, r in enumerate(np.linspace(0, 1, M))]
    return tr, streams


def replay_epoch(tr, stream, first, last, cache_pages, tau):
    core = SimCore(tr.n, tr.T, cache_pages)
    vals = stream.values.tolist()
    rec, _ = run_epoch(core, tr.requests.tolist(), first, last, lambda t: vals[t - 1], tau=tau)
    return rec


def test_icbrt():
    assert [icbrt(x) for x in (0, 1, 7, 8, 26, 27, 4096, 2**18)] == [0, 1, 1, 2, 2, 3, 16, 64]


def test_schedule_partitions_rounds():
    s = EpochSchedule.default(10, 3)
    assert s.count == 4
    assert list(s) == [(1, 3), (4, 6), (7, 9), (10, 10)]
    assert EpochSchedule.default(4096).tau == 16
    assert EpochSchedule.default(1).tau == 1
    with pytest.raises(ValidationError):
        EpochSchedule(5, 0)


def test_epoch_of_repeated_cached_page():
    tau = 5
    tr = augment_sequence([1] * tau, 3)
    rec = replay_epoch(tr, perfect_nat(tr), 1, tau, {1, 2}, tau)
    assert (rec.f, rec.F, rec.evictions) == (1, 1 / tau, 0)


def test_epoch_of_distinct_missing_pages():
    tau = 4
    tr = augment_sequence([3, 4, 5, 6], 6)
    rec = replay_epoch(tr, perfect_nat(tr), 1, tau, {1, 2}, tau)
    assert (rec.f, rec.F) == (tau, 1.0)


def test_unit_epochs_always_cost_one():
    tr, streams = random_case(0)
    _, recs = scs_run(tr, streams, k=3, tau=1, seed=0)
    assert all(r.F == 1.0 for r in recs)


def test_short_last_epoch_divides_by_tau():
    rec = epoch_cost(1, 1, 10, [None, 3], [5, 5], 9)
    assert rec.f == 2 and rec.F == 0.2


def test_single_predictor_is_sim_restarted_each_epoch():
    tr, streams = random_case(1, T=100)
    tau = 7
    rep, recs = scs_run(tr, streams[:1], k=3, tau=tau, seed=5)
    cache = set(default_cache(3).pages)
    total = 0
    for e, (first, last) in enumerate(EpochSchedule(tr.T, tau), start=1):
        core = SimCore(tr.n, tr.T, cache)
        vals = streams[0].values.tolist()
        rec, ev = run_epoch(core, tr.requests.tolist(), first, last, lambda t: vals[t - 1], tau=tau)
        total += sum(x is not None for x in ev)
        cache = core.cache
        assert recs[e - 1].predictor == 1 and recs[e - 1].f == rec.f
    assert rep.cost == total


def test_one_epoch_is_sim_on_the_drawn_predictor():
    tr, streams = random_case(2, T=50)
    rep, recs = scs_run(tr, streams, k=3, tau=tr.T, seed=9)
    assert len(recs) == 1
    j = recs[0].predictor
    assert rep.cost == sim_run(tr, streams[j - 1], k=3).cost


def test_bandit_discipline():
    tr, streams = random_case(3, T=90)
    pool = PredictorPool(streams, BANDIT)
    rep, recs = scs_run(tr, pool, k=3, tau=9, seed=1)
    assert [t for _, t in pool.query_log] == list(range(1, 91))
    for e, (first, last) in enumerate(EpochSchedule(90, 9)):
        used = {j for j, t in pool.query_log[first - 1:last]}
        assert used == {recs[e].predictor}


def test_scs_needs_bandit_pool():
    tr, streams = random_case(3)
    with pytest.raises(ValidationError):
        scs_run(tr, PredictorPool(streams, FULL_INFORMATION), k=3)


def test_scs_deterministic():
    tr, streams = random_case(4, T=200)
    a, ra = scs_run(tr, streams, k=3, seed=11)
    b, rb = scs_run(tr, streams, k=3, seed=11)
    assert a.evictions == b.evictions and ra == rb


@settings(max_examples=30)
@given(seed=st.integers(0, 10**6), tau=st.integers(1, 12), k=st.integers(1, 5))
def test_epoch_sandwich_and_obliviousness(seed, tau, k):
    tr, streams = random_case(seed, n=7, T=50)
    _, recs = scs_run(tr, streams, k=k, tau=tau, seed=seed)
    g = np.random.default_rng(seed)
    for rec, (first, last) in zip(recs, EpochSchedule(tr.T, tau)):
        assert rec.evictions <= rec.f <= rec.evictions + k
        fs = {replay_epoch(tr, streams[rec.predictor - 1], first, last,
                           set(g.choice(np.arange(1, 8), k, replace=False).tolist()), tau).F
              for _ in range(10)}
        assert fs == {rec.F}


def test_scs_beats_following_a_noisy_predictor():
    n, k, M, T = 50, 10, 10, 2**15
    scs, noisy, scs_half, opt_half = [], [], [], []
    for s in range(20):
        g = np.random.default_rng(s)
        tr = augment_sequence(g.integers(1, n + 1, T), n)
        opt = fitf_run(tr, k=k).cost
        streams = [perfect_nat(tr)] + [uniform_noise(tr, s, f"noise:{j}") for j in range(2, M + 1)]
        scs.append(scs_run(tr, streams, k=k, seed=s)[0].cost - opt)
        noisy.append(sim_run(tr, streams[1], k=k).cost - opt)
        half = augment_sequence(tr.body[: T // 2], n)
        hs = [perfect_nat(half)] + [uniform_noise(half, s, f"noise:{j}") for j in range(2, M + 1)]
        scs_half.append(scs_run(half, hs, k=k, seed=s)[0].cost - fitf_run(half, k=k).cost)
    assert np.mean(scs) < np.mean(noisy)
    assert np.mean(scs) / T < np.mean(scs_half) / (T // 2)


def test_default_epsilon():
    assert math.isclose(default_epsilon(10**4, 10, 8), math.sqrt(10 * math.log(8) / 10**4))
    assert abs(default_epsilon(10**4, 10, 8) - 0.0456) < 5e-4
    assert abs(default_epsilon(10**3, 10, 8) - 0.144) < 5e-4
    assert default_epsilon(10, 10, 8) == 0.2
    assert default_epsilon(100, 3, 1) == 0.0


def test_epsilon_range_checked():
    tr, streams = random_case(5)
    with pytest.raises(ValidationError):
        multiplexer_run(tr, streams, k=3, epsilon=0.25)
    with pytest.raises(ValidationError):
        multiplexer_run(tr, PredictorPool(streams, BANDIT), k=3)


def test_multiplexer_single_instance_is_sim():
    tr, streams = random_case(6, T=300)
    rep = multiplexer_run(tr, streams[1:2], k=3, seed=0)
    sim = sim_run(tr, streams[1], k=3).cost
    assert rep.cost <= sim + 3
    assert rep.details["switches"] == 0


def test_identical_instances_never_switch():
    tr, streams = random_case(7, T=500)
    rep = multiplexer_run(tr, [streams[2]] * 4, k=3, epsilon=0.2, seed=3)
    assert rep.details["switches"] == 0 and rep.sync_cost == 0
    assert rep.cost == sim_run(tr, streams[2], k=3).cost


def test_multiplexer_deterministic_and_consistent():
    tr, streams = random_case(8, T=400)
    a = multiplexer_run(tr, streams, k=3, seed=2)
    b = multiplexer_run(tr, streams, k=3, seed=2)
    assert a.cost == b.cost and a.evictions == b.evictions
    assert a.cost == int(a.per_round_miss.sum()) + a.sync_cost
    assert a.details["sim_costs"] == [sim_run(tr, s, k=3).cost for s in streams]


def test_multiplexer_follows_the_good_predictor():
    g = np.random.default_rng(0)
    tr = augment_sequence(g.integers(1, 21, 2**13), 20)
    streams = [perfect_nat(tr), uniform_noise(tr, 0)]
    rep = multiplexer_run(tr, streams, k=5, epsilon=0.05, seed=0)
    bound = (1 + 0.1) * rep.details["sim_costs"][0] + (1 / 0.05 + 7 / 6) * 5 * math.log(2)
    assert rep.cost <= bound
    assert rep.details["followed"] == 1
