import pytest
from hypothesis import given, strategies as st

from ails_hfvrp.adapt import (AcceptState, HeuristicStats, accept, record_and_adjust,
                              threshold, update_average)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def adjusted(omega, d_obs, d_beta=15, gamma=1, n=100):
    s = HeuristicStats(omega=omega)
    for _ in range(gamma):
        record_and_adjust(s, d_obs, d_beta, gamma, n)
    return s


def test_omega_update_examples():
    assert adjusted(10, 5).omega == pytest.approx(30)
    assert adjusted(10, 15).omega == pytest.approx(10)
    assert adjusted(50, 1.5).omega == 100  # 500 clamped to n


def test_omega_waits_for_gamma_uses():
    s = HeuristicStats(omega=10)
    for d in (2, 4, 6):
        record_and_adjust(s, d, 15, 4, 100)
    assert s.omega == 10 and s.uses == 3 and s.distance_sum == 12
    record_and_adjust(s, 8, 15, 4, 100)  # mean 5
    assert s.omega == pytest.approx(30) and s.uses == 0 and s.distance_sum == 0


def test_zero_distance_counts_as_one():
    assert adjusted(4, 0, d_beta=15).omega == pytest.approx(60)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        record_and_adjust(HeuristicStats(omega=3), -1, 15, 20, 10)


@given(st.floats(0.5, 200), st.floats(0, 1000), st.integers(1, 300))
def test_omega_stays_clamped(omega, d_obs, n):
    s = adjusted(omega, d_obs, n=n)
    assert 1 <= s.omega <= n
    assert 1 <= s.degree(n) <= n


def test_degree_rounds_to_nearest():
    assert HeuristicStats(omega=2.5).degree(10) == 3
    assert HeuristicStats(omega=2.49).degree(10) == 2
    assert HeuristicStats(omega=0.2).degree(10) == 1
    assert HeuristicStats(omega=12).degree(10) == 10


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5])
def test_linear_response_reaches_fixed_point(k):
    d_beta, gamma, n = 15, 20, 1000
    s = HeuristicStats(omega=3.0)
    for _ in range(50):
        for _ in range(gamma):
            record_and_adjust(s, k * s.omega, d_beta, gamma, n)
    assert k * s.omega == pytest.approx(d_beta, rel=0.05)


def test_weighted_average_examples():
    st_ = AcceptState(eta=0.2, window_size=20, mean=100.0, it=24)
    update_average(st_, 120)
    assert st_.mean == pytest.approx(101) and st_.it == 25
    first = update_average(AcceptState(eta=0.2, window_size=20), 50)
    assert first.mean == 50 and first.it == 1


@given(finite, st.integers(1, 30), st.integers(1, 80))
def test_constant_stream_is_fixed_point(c, lam, steps):
    s = AcceptState(eta=0.5, window_size=lam)
    for _ in range(steps):
        update_average(s, c)
        assert s.mean == pytest.approx(c, abs=1e-9 * max(1, abs(c)))


def test_warm_up_mean_is_plain_average():
    s = AcceptState(eta=0.2, window_size=5)
    for f in (10, 20, 30, 40):
        update_average(s, f)
    assert s.mean == pytest.approx(25)


def test_window_slides():
    s = AcceptState(eta=0.2, window_size=3)
    for f in (1, 5, 6, 7):
        update_average(s, f)
    assert list(s.window) == [5, 6, 7] and s.recent_best == 5


def state(low, mean, eta):
    s = AcceptState(eta=eta, window_size=20, mean=mean, it=30)
    s.window.append(low)
    return s


def test_threshold_examples():
    assert threshold(state(100, 110, 0.2)) == pytest.approx(102)
    assert threshold(state(100, 110, 0.0)) == 100
    assert threshold(state(100, 110, 1.0)) == pytest.approx(110)


def test_threshold_needs_a_sample():
    with pytest.raises(ValueError):
        threshold(AcceptState(eta=0.2, window_size=20))


def test_accept_examples():
    s = state(100, 110, 0.2)
    assert accept(s, threshold(s))
    for eta in (0.0, 0.3, 1.0):
        assert accept(state(100, 110, eta), 99)
    assert not accept(s, 111)


@given(st.floats(0, 1e4), st.floats(0, 1e3), st.floats(0, 1), st.floats(0, 1))
def test_threshold_monotone_in_eta(low, spread, e1, e2):
    lo_eta, hi_eta = sorted((e1, e2))
    assert threshold(state(low, low + spread, lo_eta)) <= threshold(state(low, low + spread, hi_eta))


@given(st.floats(0, 1e4), st.floats(0, 1e3), st.floats(0, 1), finite, finite)
def test_accept_monotone_in_objective(low, spread, eta, f1, f2):
    a, b = sorted((f1, f2))
    s = state(low, low + spread, eta)
    if accept(s, b):
        assert accept(s, a)


@given(st.lists(st.floats(0, 1e5), min_size=1, max_size=60), st.integers(1, 20))
def test_window_best_below_mean_during_warm_up(stream, lam):
    s = AcceptState(eta=0.2, window_size=lam)
    for f in stream:
        update_average(s, f)
        if s.it <= lam:
            assert s.recent_best <= s.mean + 1e-9 * max(1.0, s.mean)


def test_window_best_can_exceed_mean_after_warm_up():
    # old low values linger in the weighted mean after leaving the window
    s = AcceptState(eta=0.2, window_size=2)
    for f in (0, 0, 100, 100):
        update_average(s, f)
    assert s.recent_best == 100 and s.mean == pytest.approx(75)
