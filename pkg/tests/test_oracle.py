import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ebtc.instances import eps_good_set
from ebtc.oracle import (ArmNotEpsGoodError, NonUniqueBestArmError, hardness_bracket,
                         hardness_constants, modified_instance, phi_value, psi_value, solve_bai,
                         solve_bai_beta, solve_eps, solve_eps_multiplicative,
                         solve_eps_multiplicative_exact)

from oracles import brute_force_allocation, hardness_level_bruteforce, time_of

MU3 = (0.6, 0.6, 0.55, 0.45, 0.3, 0.2)


def costs(alloc, means, c=1.0, scale=1.0):
    """Transportation costs against the best arm; ``scale`` multiplies the other means."""
    w = alloc.weights
    b = int(np.argmax(means))
    return [(means[b] - scale * means[j]) ** 2 / (1 / w[b] + c / w[j])
            for j in range(len(means)) if j != b]


def instances(min_k=2, max_k=8):
    return st.lists(st.floats(-3, 3), min_size=min_k, max_size=max_k).filter(
        lambda m: sorted(m)[-1] - sorted(m)[-2] > 1e-2 and max(m) - min(m) < 5)


# -- closed forms ---------------------------------------------------------------

def test_psi_phi_examples():
    assert psi_value((1, 0), 2.0) == pytest.approx(0.0, abs=1e-15)
    assert psi_value((1, 0, 0), 1 + math.sqrt(2)) == pytest.approx(0.0, abs=1e-14)
    assert psi_value((1, 0), 1e9) == pytest.approx(-1.0, abs=1e-12)
    assert phi_value((1, 0), 0.5, 2.0) == pytest.approx(0.0, abs=1e-15)
    assert phi_value((1, 0), 0.5, 3.0) == pytest.approx(-0.5, abs=1e-15)
    assert phi_value((1, 0), 1 - 1e-12, 3.0) == pytest.approx(0.5, abs=1e-9)


def test_psi_rejects_r_below_pole():
    with pytest.raises(ValueError):
        psi_value((1, 0), 1.0)
    with pytest.raises(ValueError):
        phi_value((1, 0), 0.5, 0.5)


def test_two_arms_exact():
    a = solve_bai((1, 0))
    assert a.time == pytest.approx(8.0, abs=1e-9)
    assert a.weights == pytest.approx((0.5, 0.5), abs=1e-9)
    b = solve_bai_beta((1, 0), 0.5)
    assert b.time == pytest.approx(8.0, abs=1e-9) and b.beta == 0.5


def test_two_arms_beta_09():
    a = solve_bai_beta((1, 0), 0.9)
    assert a.weights == pytest.approx((0.9, 0.1), abs=1e-12)
    assert a.time == pytest.approx(2 * (1 / 0.9 + 1 / 0.1), rel=1e-12)


def test_three_arms_symmetric():
    a = solve_bai((1, 0, 0))
    s2 = math.sqrt(2)
    assert a.weights == pytest.approx((s2 - 1, (2 - s2) / 2, (2 - s2) / 2), abs=1e-9)
    assert a.time == pytest.approx(11.656854249492, abs=1e-9)


def test_non_unique_best_arm():
    with pytest.raises(NonUniqueBestArmError):
        solve_bai((1, 1, 0))
    with pytest.raises(NonUniqueBestArmError):
        solve_eps(MU3, 0.0)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        solve_bai((1,))
    with pytest.raises(ValueError):
        solve_bai_beta((1, 0), 1.0)
    with pytest.raises(ValueError):
        solve_eps((1, 0), -0.1)
    with pytest.raises(ValueError):
        solve_eps_multiplicative((1, 0), 0.1)
    with pytest.raises(ValueError):
        solve_eps_multiplicative((1, 0.5), 1.0)


# -- values frozen from the brute-force oracle (grid search plus SLSQP refinement) --

@pytest.mark.parametrize("call, expected", [
    (lambda: solve_bai((1, 0.5, 0)).time, 34.28488253266778),
    (lambda: solve_bai_beta((1, 0.5, 0), 0.5).time, 34.422205101861834),
    (lambda: solve_eps_multiplicative((1, 0.5, 0.25), 0.2).time, 20.890048302335607),
    (lambda: solve_bai((1, 0.8, 0.5, 0.2)).time, 211.92053403562454),
    (lambda: solve_eps((1, 0.8, 0.5, 0.2), 0.1, 0.5).time, 98.6236552264055),
    (lambda: solve_eps((0.6, 0.6, 0.5), 0.1, None, 1).time, 857.12206331622),
])
def test_frozen_brute_force_times(call, expected):
    assert call() == pytest.approx(expected, rel=1e-6)


def test_frozen_brute_force_weights():
    a = solve_bai((1, 0.5, 0))
    assert a.weights == pytest.approx((0.469067584571, 0.464312614979, 0.066619800449), abs=1e-6)


@pytest.mark.parametrize("means, kwargs", [
    ((1, 0.5, 0), {}),
    ((1, 0.5, 0), {"beta": 0.5}),
    ((1, 0.7, 0.65, 0.1), {"beta": 0.4}),
    ((0.9, 0.3), {"eps": 0.2}),
    ((0.6, 0.55, 0.2), {"eps": 0.1, "beta": 0.5}),
])
def test_live_brute_force_additive(means, kwargs):
    eps = kwargs.get("eps", 0.0)
    T, _ = brute_force_allocation(means, eps=eps, beta=kwargs.get("beta"))
    ours = solve_eps(means, eps, kwargs.get("beta"))
    assert ours.time == pytest.approx(T, rel=1e-4)


@pytest.mark.parametrize("means, eps, beta", [
    ((1, 0.5), 0.2, None), ((1, 0.5, 0.25), 0.2, 0.5), ((2, 1.5, 1.2, 0.4), 0.1, None)])
def test_live_brute_force_multiplicative(means, eps, beta):
    T, _ = brute_force_allocation(means, eps=eps, beta=beta, multiplicative=True)
    assert solve_eps_multiplicative(means, eps, beta).time == pytest.approx(T, rel=1e-4)


# -- reductions -------------------------------------------------------------------

def test_modified_instance_examples():
    assert modified_instance((1, 0), 1, 0) == (1, -1)
    assert modified_instance((0.6, 0.6, 0.5), 0.1, 0) == pytest.approx((0.6, 0.5, 0.4))
    assert modified_instance((0.6, 0.6, 0.5), 0.1, 1) == pytest.approx((0.5, 0.6, 0.4))


def test_eps_two_arm_closed_form():
    a = solve_eps((1, 0), 1.0, 0.5, 0)
    assert a.time == pytest.approx(2.0, rel=1e-12)
    assert a.weights == pytest.approx((0.5, 0.5), abs=1e-12)


def test_reduction_is_bit_identical():
    for i in (0, 1, 2):
        direct = solve_eps(MU3, 0.1, 0.5, i)
        reduced = solve_bai_beta(modified_instance(MU3, 0.1, i), 0.5)
        assert direct == reduced


def test_reference_arm_must_be_eps_good():
    with pytest.raises(ArmNotEpsGoodError):
        solve_eps(MU3, 0.1, 0.5, 3)


def test_best_arm_choice_does_not_change_time():
    assert solve_eps(MU3, 0.1, None, 0).time == pytest.approx(solve_eps(MU3, 0.1, None, 1).time, rel=1e-12)


def test_multiplicative_at_zero_equals_additive():
    assert solve_eps_multiplicative((1, 0.5), 0.0, 0.5) == solve_bai_beta((1, 0.5), 0.5)


def test_multiplicative_two_arm_closed_form():
    a = solve_eps_multiplicative((1, 0.5), 0.2, 0.5)
    assert a.time == pytest.approx(2 * (2 + 1.28) / 0.36, rel=1e-12)


def test_multiplicative_beta_unimodal_against_grid():
    means, eps = (1, 0.5, 0.25), 0.2
    grid = np.arange(1e-3, 1.0, 1e-3)
    times = [solve_eps_multiplicative(means, eps, b).time for b in grid]
    k = int(np.argmin(times))
    assert all(a >= b for a, b in zip(times[:k], times[1:k + 1]))
    assert all(a <= b for a, b in zip(times[k:], times[k + 1:]))
    assert solve_eps_multiplicative(means, eps).time <= min(times) * (1 + 1e-9)


def test_min_weight_over_half_good_arms():
    # the lower bound on weights covers challengers that are themselves eps/2-good
    means, eps = (1, 0.95, 0), 0.1
    a = solve_eps(means, eps, 0.5, 1)
    bound = 1 / (16 * (len(means) - 2) + 2)
    assert a.weights[0] >= bound
    assert a.time <= 32 * len(means) / eps ** 2


# -- hardness constants -------------------------------------------------------------

def test_hardness_two_groups():
    means = (0.6,) * 3 + (0.4,) * 7
    assert hardness_constants(means, 0.1).h_levels[0] == pytest.approx(16000.0, rel=1e-12)


def test_hardness_level_one_formula():
    means = (1.0, 0.7, 0.5, 0.5, 0.1)
    K, dmin, e0 = 5, 0.3, 0.05
    assert hardness_constants(means, e0).h_levels[0] == pytest.approx(K * (2 / dmin + 3 / e0) ** 2, rel=1e-12)


def test_hardness_three_groups_upper_bracket():
    means = (1.0, 1.0, 0.8, 0.8, 0.5)
    h2 = hardness_constants(means, 0.1).h_levels[1]
    assert h2 <= 5 * 50 ** 2


def test_hardness_mu3_matches_independent_evaluation_and_brackets():
    h = hardness_constants(MU3, 0.1)
    for level, value in enumerate(h.h_levels, start=1):
        assert value == pytest.approx(hardness_level_bruteforce(MU3, 0.1, level), rel=1e-12)
        lo, hi = hardness_bracket(MU3, 0.1, level)
        assert lo <= value <= hi * (1 + 1e-12)


def test_hardness_eps_covering_everything():
    # no arm outside the good set: only the good non-best arms contribute, at (1/eps0)^2 each
    h = hardness_constants((1.0, 0.9, 0.8), 0.1, eps_tilde=5.0)
    assert h.h_eps == pytest.approx(200.0, rel=1e-12)


# -- identities as properties ----------------------------------------------------------

@settings(max_examples=150)
@given(instances())
def test_overall_balance_and_equilibrium(means):
    a = solve_bai(means)
    b = int(np.argmax(means))
    w = np.asarray(a.weights)
    assert abs(w.sum() - 1) < 1e-12
    assert abs(w[b] ** 2 - (np.delete(w, b) ** 2).sum()) < 1e-9
    c = costs(a, means)
    assert max(c) - min(c) < 1e-9 * max(c)
    assert 2 / a.time == pytest.approx(min(c), rel=1e-9)


@settings(max_examples=150)
@given(instances(), st.floats(0.05, 0.95))
def test_beta_solution_equilibrium(means, beta):
    a = solve_bai_beta(means, beta)
    b = int(np.argmax(means))
    assert a.weights[b] == beta
    assert abs(sum(a.weights) - 1) < 1e-12
    c = costs(a, means)
    assert max(c) - min(c) < 1e-9 * max(c)


@settings(max_examples=150)
@given(instances())
def test_worst_case_and_sandwich(means):
    T = solve_bai(means).time
    assert solve_bai_beta(means, 0.5).time <= 2 * T * (1 + 1e-9)
    gaps = sorted(max(means) - m for m in means)
    d = [gaps[1]] + gaps[1:]
    H = 2 * sum(x ** -2 for x in d)
    assert H * (1 - 1e-9) <= T <= 2 * H * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(instances(2, 5).map(lambda m: [x + 4 for x in m]),
       st.floats(0.01, 0.5))
def test_multiplicative_overall_balance(means, eps):
    a = solve_eps_multiplicative(means, eps)
    exact = solve_eps_multiplicative_exact(means, eps)
    b = int(np.argmax(means))
    w = np.asarray(a.weights)
    ratio = (np.delete(w, b) / w[b]) ** 2
    assert ratio.sum() == pytest.approx((1 - eps) ** 2, abs=1e-6)
    assert a.time == pytest.approx(exact.time, rel=1e-9)
    c = costs(exact, means, c=(1 - eps) ** 2, scale=1 - eps)
    assert max(c) - min(c) < 1e-9 * max(c)


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=8), st.floats(0.01, 0.5), st.data())
def test_eps_half_good_bounds(means, eps, data):
    good = sorted(eps_good_set(means, eps / 2))
    i = data.draw(st.sampled_from(good))
    a = solve_eps(means, eps, 0.5, i)
    K = len(means)
    assert a.time <= 32 * K / eps ** 2 * (1 + 1e-9)
    bound = 1 / (16 * (K - 2) + 2)
    for j in eps_good_set(means, eps / 2) - {i}:
        assert a.weights[j] >= bound * (1 - 1e-9)


@settings(max_examples=100)
@given(instances(), st.floats(0.01, 0.5), st.floats(0.01, 0.5), st.sampled_from([None, 0.3, 0.5]))
def test_time_relation_across_slacks(means, e0, e1, beta):
    assume(abs(e0 - e1) > 1e-6)
    hi, lo = max(e0, e1), min(e0, e1)
    dmin = sorted(max(means) - m for m in means)[1]
    lhs = solve_eps(means, hi, beta).time * (dmin + hi) ** 2
    rhs = solve_eps(means, lo, beta).time * (dmin + lo) ** 2
    assert lhs >= rhs * (1 - 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=3).filter(
    lambda m: sorted(m)[-1] - sorted(m)[-2] > 0.05))
def test_time_matches_allocation(means):
    a = solve_bai(means)
    assert time_of(a.weights, means) == pytest.approx(a.time, rel=1e-9)
