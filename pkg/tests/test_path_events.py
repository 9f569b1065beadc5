import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slebubbles import path_events as pe
from slebubbles import reference as ref
from slebubbles.stable_walk import derive_seed, sample_pair, sample_walk


@st.composite
def lattice_walks(draw, max_len=60):
    inc = draw(st.lists(st.one_of(st.just(1), st.integers(-6, -1)), min_size=1, max_size=max_len))
    return np.concatenate([[0], np.cumsum(inc)]).astype(np.int64)


@st.composite
def lattice_pairs(draw, max_len=60):
    n = draw(st.integers(1, max_len))
    steps = st.lists(st.one_of(st.just(1), st.just(1), st.integers(-6, -1)), min_size=n, max_size=n)
    L = np.concatenate([[0], np.cumsum(draw(steps))]).astype(np.int64)
    R = np.concatenate([[0], np.cumsum(draw(steps))]).astype(np.int64)
    return L, R


# -- hand examples ---------------------------------------------------------

def test_first_passage_examples():
    assert pe.first_passage_below([0, 1, 2, -3], -1) == 3
    with pytest.raises(pe.HorizonExhausted) as exc:
        pe.first_passage_below([0, 1, 2], -1)
    assert exc.value.horizon == 2
    assert pe.first_passage_below([0, -2, 1, -3], -1, start=2) == 3


def test_last_running_min_examples():
    assert pe.last_running_min_before([0, -1, -2, 5], 3) == 2
    assert pe.last_running_min_before([0, 1, 2, 3, 4], 4) == 0
    # ties go to the last attaining index
    assert pe.last_running_min_before([0, -1, 0, -1, 3], 5) == 3


def test_sigma_examples():
    assert pe.sigma_of(([0, 1, 2, 3], [0, 1, 1, 2]), 4) == 0
    assert pe.sigma_of(([0, -1, 0, 1], [0, 1, 2, 3]), 4) == 1
    assert pe.sigma_many(([0, -1, 0, 1], [0, 1, 2, 3]), [1, 2, 3, 4]).tolist() == [0, 1, 1, 1]


def test_record_examples():
    assert list(pe.record_min_set([0, 1, -1, -1])) == [0, 2]
    assert list(pe.record_min_set([0, 1, 2, 3])) == [0]


def test_cut_time_examples():
    c = pe.cut_times(([0, 1, -1], [0, 1, -1]), 2)
    assert [(x.t, x.left_bubble_time, x.right_bubble_time) for x in c] == [(0, 2, 2)]
    assert c.dropped == 0
    assert list(pe.cut_times(([0, -1, -2, -3], [0, 1, 2, 3]), 3)) == []
    # passage beyond the horizon: dropped and counted
    c = pe.cut_times(([0, 1, 2], [0, 1, -1]), 2)
    assert list(c) == [] and c.dropped == 1


def test_theta_examples():
    assert pe.theta_before_hit(([0, 1, 2], [0, 1, 2]), 2) == 1
    # ties with the running max count as suprema
    assert pe.theta_before_hit(([0, -1, 0, 1], [0, 1, 2, 3]), 3) == 2
    with pytest.raises(pe.HorizonExhausted):
        pe.theta_before_hit(([0, 1], [0, 1]), 2)


def test_global_cut_example():
    L = [0, 1, 2, 3, -1, 0, 1]
    R = [0, 1, 2, 3, 4, -2, -1]
    assert pe.global_cut_times((L, R), 6) == [0, 1, 2]
    assert pe.global_cut_times(([0, -1, -2], [0, 1, 2]), 2) == []


def test_event_times():
    L = [0, 1, 2, 3, 4, 5]
    R = [0, -1, 0, 1, -3, -2]
    ev = pe.event_times((L, R), 1)
    assert (ev.tau, ev.xi, ev.sigma) == (4, 1, 1)


def test_bad_arguments():
    with pytest.raises(ValueError):
        pe.sigma_of(([0, 1], [0, 1]), 0)
    with pytest.raises(ValueError):
        pe.last_running_min_before([0, 1], 0)
    with pytest.raises(ValueError):
        pe.theta_before_hit(([0, 1], [0, 1]), 0)


# -- oracle agreement on simulated walks ------------------------------------

@pytest.mark.parametrize("kappa", [4.5, 6.0, 7.5])
def test_random_pairs_match_oracles(kappa):
    for i in range(60):
        p = sample_pair(kappa, 1, 120, derive_seed(99, i))
        L, R = p.L.values, p.R.values
        Ll, Rl = L.tolist(), R.tolist()
        sig = pe.sigma_many(p, range(1, 121))
        for t in range(1, 121):
            s = ref.sigma_of(Ll, Rl, t)
            assert pe.sigma_of(p, t) == s == sig[t - 1]
            assert pe.last_running_min_before(R, t) == ref.last_running_min_before(Rl, t)
        assert list(pe.record_min_set(L, 120)) == ref.record_min_set(Ll, 120)
        assert [(c.t, c.left_bubble_time, c.right_bubble_time) for c in pe.cut_times(p)] == \
            ref.cut_times(Ll, Rl, 120)
        assert pe.global_cut_times(p) == ref.global_cut_times(Ll, Rl, 120)


def test_first_passage_random():
    for i in range(200):
        v = sample_walk(6.0, 1, 200, derive_seed(5, i)).values
        for lev in (0, -1, -3, -10):
            want = ref.first_passage_below(v.tolist(), lev)
            if want is None:
                with pytest.raises(pe.HorizonExhausted):
                    pe.first_passage_below(v, lev)
            else:
                assert pe.first_passage_below(v, lev) == want


# -- properties ------------------------------------------------------------

@given(lattice_pairs())
@settings(max_examples=300, deadline=None)
def test_sigma_properties(pair):
    L, R = pair
    H = len(L) - 1
    ts = np.arange(1, H + 1)
    many = pe.sigma_many(pair, ts)
    for t in ts:
        s = pe.sigma_of(pair, int(t))
        assert s == many[t - 1] == ref.sigma_of(L.tolist(), R.tolist(), int(t))
        assert 0 <= s < t
        assert np.all(L[s:t] >= L[s]) and np.all(R[s:t] >= R[s])
    # sigma(t) > 0 is a lattice cut time when its passages exist
    full = pe.cut_times(pair)
    full_t = {c.t for c in full}
    for t in ts:
        s = int(many[t - 1])
        if s > 0 and s + 1 < t and L[s + 1] > L[s] and R[s + 1] > R[s]:
            if np.any(L[s + 1:] < L[s]) and np.any(R[s + 1:] < R[s]):
                assert s in full_t


@given(lattice_walks())
@settings(max_examples=300, deadline=None)
def test_records_strictly_decrease(v):
    rec = list(pe.record_min_set(v))
    assert rec[0] == 0
    assert all(v[a] > v[b] for a, b in zip(rec, rec[1:]))
    assert rec == ref.record_min_set(v.tolist(), len(v) - 1)


@given(lattice_walks())
@settings(max_examples=200, deadline=None)
def test_xi_before_tau(v):
    try:
        tau = pe.first_passage_below(v, -1)
    except pe.HorizonExhausted:
        return
    xi = pe.last_running_min_before(v, tau)
    assert xi < tau and v[xi] == v[:tau].min()


@given(lattice_pairs(max_len=80))
@settings(max_examples=200, deadline=None)
def test_theta_monotone_in_level(pair):
    L, R = pair
    prev = -1
    for r in range(1, int(R.max()) + 1):
        th = pe.theta_before_hit(pair, r)
        assert th == ref.theta_before_hit(L.tolist(), R.tolist(), r)
        assert th >= prev
        prev = th


@given(lattice_pairs())
@settings(max_examples=200, deadline=None)
def test_cut_time_invariants(pair):
    L, R = pair
    for c in pe.cut_times(pair):
        assert c.left_bubble_time > c.t and c.right_bubble_time > c.t
        assert L[c.left_bubble_time] < L[c.t] and np.all(L[c.t:c.left_bubble_time] >= L[c.t])
        assert R[c.right_bubble_time] < R[c.t] and np.all(R[c.t:c.right_bubble_time] >= R[c.t])
