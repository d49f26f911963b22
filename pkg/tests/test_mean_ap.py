import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koopdiff.estimators import PreconditionError
from koopdiff.mean_ap import (CONSISTENT, NOT_MEAN_AP, MeanApParams, classify_discrete_spectrum,
                              classify_observable, default_k_max, eps_almost_periods,
                              mean_seminorm_diff, relative_denseness_gap, seminorm_profile)
from koopdiff.systems import (BernoulliShift, IrrationalRotation, Observable, SampledSignal,
                              SubstitutionSubshift, two_sided_samples)

PM = {"a": 1.0, "b": -1.0}
TM = SubstitutionSubshift((("a", "ab"), ("b", "ba")), "thue-morse")


def naive_seminorm(v, t):
    # direct double loop over the overlap of [-N, N] with its shift
    N = (len(v) - 1) // 2
    total, count = 0.0, 0
    for s in range(-N, N + 1):
        if -N <= s + t <= N:
            total += abs(v[s + N] - v[s + t + N])
            count += 1
    return total / count


# ------------------------------------------------------------------ seminorm


def test_params_validated():
    with pytest.raises(PreconditionError):
        MeanApParams(horizon=5000, shift_range=1000)
    with pytest.raises(PreconditionError):
        MeanApParams(eps=(0.1, 0.2))
    with pytest.raises(PreconditionError):
        MeanApParams(eps=(0.5, -0.1))
    with pytest.raises(PreconditionError):
        MeanApParams(trials=0)
    assert MeanApParams(k_max={"0.5": "40"}).k_max == {0.5: 40}


def test_zero_shift_and_guard():
    v = np.random.default_rng(0).normal(size=2001)
    assert mean_seminorm_diff(v, 0, 1000) == 0.0
    with pytest.raises(PreconditionError):
        mean_seminorm_diff(v, 101, 1000)
    with pytest.raises(PreconditionError):
        mean_seminorm_diff(v, 3, 999)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(-20, 20))
def test_seminorm_matches_naive(seed, t):
    v = np.random.default_rng(seed).normal(size=401)
    assert mean_seminorm_diff(v, t, 200) == pytest.approx(naive_seminorm(v, t), rel=1e-12)


def test_periodic_period_is_exact_zero():
    v = np.tile([1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 7.0], 300)[:2001]
    assert mean_seminorm_diff(v, 7, 1000) == 0.0
    assert mean_seminorm_diff(v, -14, 1000) == 0.0
    assert mean_seminorm_diff(v, 3, 1000) > 0


def test_iid_signs_near_one():
    N = 100_000
    v = np.random.default_rng(1).choice([-1.0, 1.0], size=2 * N + 1)
    for t in (1, 7, 500):
        assert abs(mean_seminorm_diff(v, t, N) - 1.0) <= 3 / np.sqrt(N)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_profile_even_within_edge_terms(seed):
    N, T = 5000, 200
    v = np.random.default_rng(seed).normal(size=2 * N + 1)
    prof = seminorm_profile(v, T)
    for t in (1, 50, T):
        assert mean_seminorm_diff(v, -t, N) == pytest.approx(prof[t], abs=2 * T / N)
    assert prof[0] == 0.0 and np.all(prof >= 0)


def test_profile_accepts_sampled_signal():
    sig = two_sided_samples(IrrationalRotation(), Observable.character(), 0.2, 2000)
    assert isinstance(sig, SampledSignal)
    prof = seminorm_profile(sig, 100)
    assert prof.shape == (101,)


# ------------------------------------------------------------- almost periods


def test_constant_all_shifts():
    p = MeanApParams(horizon=20_000, shift_range=100)
    got = eps_almost_periods(np.ones(40_001), 0.1, p)
    np.testing.assert_array_equal(got, np.arange(-100, 101))


def test_fibonacci_periods_include_fibonacci_numbers():
    N, T = 100_000, 1000
    sig = two_sided_samples(SubstitutionSubshift(), Observable.letter(PM), 0, N)
    got = set(eps_almost_periods(sig, 0.5, MeanApParams(N, T)).tolist())
    assert 0 in got
    # the mismatch density at shift F_k is about 2 / (sqrt(5) F_k), so F_k is an
    # eps-almost period once 4 / (sqrt(5) F_k) < eps
    fibs = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987]
    for fib in fibs:
        expected = 4 / (np.sqrt(5) * fib) < 0.5
        assert (fib in got) == expected and (-fib in got) == expected
    assert relative_denseness_gap(sorted(got), T) <= 250


def test_iid_only_zero():
    N = 100_000
    v = np.random.default_rng(2).choice([-1.0, 1.0], size=2 * N + 1)
    assert eps_almost_periods(v, 0.5, MeanApParams(N, 1000)).tolist() == [0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_monotone_in_eps(seed, e1, e2):
    e1, e2 = sorted((e1, e2))
    v = np.random.default_rng(seed).normal(size=4001)
    p = MeanApParams(2000, 200)
    small, big = eps_almost_periods(v, e1, p), eps_almost_periods(v, e2, p)
    assert set(small.tolist()) <= set(big.tolist())
    assert np.all(np.diff(big) > 0) and 0 in small


# ------------------------------------------------------------------ denseness


def test_gap_examples():
    T = 100
    assert relative_denseness_gap(list(range(-T, T + 1)), T) == 1
    assert relative_denseness_gap([0], T) == 2 * (T - T // 10)
    assert relative_denseness_gap(list(range(-T, T + 1, 5)), T) == 5
    with pytest.raises(PreconditionError):
        relative_denseness_gap([], T)


def test_default_k_max():
    assert default_k_max(np.array([-3, 0, 3]), 1000) == 12
    assert default_k_max(np.array([0]), 1000) == 250
    assert default_k_max(np.array([0, 400]), 1000) == 250


# ----------------------------------------------------------------- classifier


def test_classifier_rotation_and_bernoulli():
    p = MeanApParams()
    rot = classify_observable(IrrationalRotation(), Observable.character(), p, seed=0)
    assert rot.verdict == CONSISTENT and rot.horizons_agree and rot.witness is None
    ber = classify_observable(BernoulliShift(), Observable.letter({"+": 1.0, "-": -1.0}), p)
    assert ber.verdict == NOT_MEAN_AP and ber.horizons_agree
    assert ber.witness["eps"] == 0.5 and ber.witness["gap"] > ber.witness["k_max"]


def test_classifier_conjunction_and_record():
    fs = [Observable.letter(PM, name="fib"), Observable.cylinder(["a", "b"])]
    res = classify_discrete_spectrum(SubstitutionSubshift(), fs, MeanApParams(trials=1), seed=3)
    assert res["overall"] == CONSISTENT and res["horizons_agree"]
    assert set(res["observables"]) == {f.name for f in fs}
    assert "not a proof" in res["note"]
    res = classify_discrete_spectrum(TM, [Observable.letter(PM)], MeanApParams(), trials=1)
    assert res["overall"] == NOT_MEAN_AP and res["params"]["trials"] == 1
    with pytest.raises(PreconditionError):
        classify_discrete_spectrum(TM, [], MeanApParams())


def test_classifier_configured_k_max():
    # an impossibly strict bound makes even the rotation fail
    p = MeanApParams(k_max={0.5: 0, 0.2: 0, 0.1: 0}, trials=1)
    assert classify_observable(IrrationalRotation(), Observable.character(), p).verdict == NOT_MEAN_AP


def test_classifier_deterministic():
    p = MeanApParams(horizon=20_000, shift_range=200, trials=1)
    a = classify_discrete_spectrum(SubstitutionSubshift(), [Observable.letter(PM)], p, seed=4)
    b = classify_discrete_spectrum(SubstitutionSubshift(), [Observable.letter(PM)], p, seed=4)
    assert a == b
