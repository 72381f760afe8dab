import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from morse_novikov.exceptions import ClassMismatchError, DegenerateCriticalPointError
from morse_novikov import models
from morse_novikov.novikov import novikov_numbers, vanishing_profile
from morse_novikov.random_models import random_trig_function
from morse_novikov.smooth import (
    BetaForm,
    ConformalFunction,
    TorusFunction,
    check_index_oracle,
    critical_points,
    d_beta,
    reduce_index,
    reduced_matrix,
    verify_theorem31,
)

DTHETA = BetaForm((1.0,))
THREE_SIN = TorusFunction.sine(1, (1,), 3.0)


def circle_distance(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def torus_distance(a, b):
    diff = np.abs(np.asarray(a) - np.asarray(b)) % (2 * np.pi)
    return float(np.linalg.norm(np.minimum(diff, 2 * np.pi - diff)))


# the deformed differential ------------------------------------------------------


def test_d_beta_of_minus_one_is_beta():
    beta = BetaForm((0.7, -1.2), TorusFunction(2, [((1, 1), 0.3, 0.2)]))
    f = TorusFunction.constant(2, -1.0)
    for x in np.random.default_rng(0).uniform(0, 2 * np.pi, (5, 2)):
        assert np.allclose(d_beta(f, beta, x), beta.coefficients(x), atol=1e-14)


def test_d_beta_with_zero_form_is_df():
    f = random_trig_function(random.Random(1), 2, 3)
    x = np.array([0.3, 2.1])
    assert np.allclose(d_beta(f, BetaForm((0.0, 0.0)), x), f.gradient(x), atol=1e-14)


def test_d_beta_three_sine():
    for th in np.linspace(0, 2 * np.pi, 7):
        expected = 3 * math.cos(th) - 3 * math.sin(th)
        assert d_beta(THREE_SIN, DTHETA, [th])[0] == pytest.approx(expected, abs=1e-13)


def test_periods_in_angle_coordinates():
    # periods are reported in units of 2*pi, the length of a coordinate loop
    assert DTHETA.periods == (1.0,)
    assert DTHETA.is_integral()
    assert not BetaForm((0.5,)).is_integral()


# critical points ---------------------------------------------------------------


def test_three_sine_critical_points():
    res = critical_points(THREE_SIN, DTHETA)
    assert res.beta_morse
    assert len(res.points) == 2
    by_index = {p.index: p.location[0] for p in res.points}
    assert circle_distance(by_index[1], math.pi / 4) < 1e-10
    assert circle_distance(by_index[0], 5 * math.pi / 4) < 1e-10
    assert all(p.residual < 1e-10 for p in res.points)


def test_shifted_sine_has_no_critical_points():
    f = THREE_SIN.scale(1 / 3) + TorusFunction.constant(1, 2.0)
    assert critical_points(f, DTHETA).points == []


def test_constant_minus_one_with_nonexact_form():
    res = critical_points(TorusFunction.constant(2, -1.0), BetaForm((1.0, 0.0)), grid=16)
    assert res.points == []
    assert verify_theorem31(TorusFunction.constant(2, -1.0), BetaForm((1.0, 0.0)), result=res)["ok"]


def _ordinary_critical_points_1d(phi, samples=4000):
    """Zeros of a central-difference derivative of ``phi`` on the circle."""
    h = 1e-6

    def dphi(x):
        return (phi(x + h) - phi(x - h)) / (2 * h)

    xs = np.linspace(0, 2 * np.pi, samples + 1)
    vals = [dphi(x) for x in xs]
    roots = []
    for a, b, va, vb in zip(xs, xs[1:], vals, vals[1:]):
        if va == 0 or va * vb < 0:
            roots.append(brentq(dphi, a, b, xtol=1e-13))
    return sorted(r % (2 * np.pi) for r in roots)


def test_exact_form_points_match_ordinary_critical_points():
    f = TorusFunction(1, [((0,), 2.0, 0.0), ((1,), 1.0, 0.0), ((2,), 0.3, -np.pi / 2)])
    h = TorusFunction(1, [((1,), 0.2, 0.0)])
    beta = BetaForm((0.0,), h)
    res = critical_points(f, beta)

    def phi(x):
        return math.exp(-h.value([x])) * f.value([x])

    ref = _ordinary_critical_points_1d(phi)
    got = sorted(p.location[0] for p in res.points)
    assert len(got) == len(ref)
    for a, b in zip(got, ref):
        assert circle_distance(a, b) < 1e-6


# indices -----------------------------------------------------------------------


def test_reduced_matrix_on_the_circle_is_f_second_minus_f():
    for th in (math.pi / 4, 5 * math.pi / 4):
        A = reduced_matrix(THREE_SIN, DTHETA, [th])
        assert A[0, 0] == pytest.approx(-6 * math.sin(th), abs=1e-12)
    assert reduce_index(THREE_SIN, DTHETA, [math.pi / 4]) == 1
    assert reduce_index(THREE_SIN, DTHETA, [5 * math.pi / 4]) == 0


def test_degenerate_point_raises():
    # f = cos(2x)/4 - cos(x): f'(0) = 0 and f''(0) = -1 + 1 = 0
    f = TorusFunction(1, [((2,), 0.25, 0.0), ((1,), -1.0, 0.0)])
    with pytest.raises(DegenerateCriticalPointError):
        reduce_index(f, BetaForm((0.0,)), [0.0])


@pytest.mark.parametrize("seed", range(6))
def test_index_matches_finite_difference_oracle(seed):
    rng = random.Random(seed)
    f = random_trig_function(rng, 2, 4, offset=rng.choice((0.0, 2.5)))
    beta = BetaForm((rng.choice((0.0, 1.0)), float(rng.choice((0, 1)))),
                    random_trig_function(rng, 2, 2, amp=0.2))
    res = critical_points(f, beta, grid=48)
    for p in res.points:
        agree, idx, err = check_index_oracle(f, beta, p)
        assert agree, (p, idx, err)
        assert idx == p.index


# counting inequalities ----------------------------------------------------------------


def test_circle_counts_meet_the_novikov_bound():
    rep = verify_theorem31(THREE_SIN, DTHETA)
    assert rep["ok"]
    assert rep["counts"] == [1, 1]
    assert rep["bound"] == [0, 0]
    assert rep["alternating_sum"] == 0
    assert rep["profile_source"] == "model"


def test_counts_against_a_given_profile():
    prof = novikov_numbers(models.circle_cw((1,)))
    assert verify_theorem31(THREE_SIN, DTHETA, prof)["ok"]


def test_class_mismatch_for_nonintegral_periods():
    with pytest.raises(ClassMismatchError):
        verify_theorem31(THREE_SIN, BetaForm((0.5,)), novikov_numbers(models.circle_cw((1,))))


def test_class_mismatch_for_wrong_class():
    with pytest.raises(ClassMismatchError):
        verify_theorem31(THREE_SIN, DTHETA, novikov_numbers(models.circle_cw((0,))))


def test_nonintegral_class_uses_vanishing_profile():
    rep = verify_theorem31(THREE_SIN, BetaForm((0.5,)))
    assert rep["profile_source"] == "vanishing"
    assert rep["bound"] == list(vanishing_profile(1).betti)


@pytest.mark.parametrize("seed", range(4))
def test_exact_class_on_the_two_torus(seed):
    rng = random.Random(10 + seed)
    f = random_trig_function(rng, 2, 4)
    beta = BetaForm((0.0, 0.0), random_trig_function(rng, 2, 2, amp=0.2))
    rep = verify_theorem31(f, beta)
    assert rep["ok"]
    assert rep["bound"] == [1, 2, 1]


# invariants ----------------------------------------------------------------------


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_conformal_gauge_invariance(seed):
    rng = random.Random(seed)
    f = random_trig_function(rng, 2, 3, offset=rng.choice((0.0, 1.5)))
    beta = BetaForm((float(rng.randint(0, 1)), 0.0), random_trig_function(rng, 2, 1, amp=0.2))
    u = random_trig_function(rng, 2, 2, amp=0.3)
    a = critical_points(f, beta, grid=40)
    b = critical_points(ConformalFunction(u, f), beta.gauge(u), grid=40)
    assert a.beta_morse == b.beta_morse
    assert len(a.points) == len(b.points)
    for p in a.points:
        dist = [torus_distance(p.location, q.location) for q in b.points]
        q = b.points[int(np.argmin(dist))]
        assert min(dist) < 1e-6
        assert p.index == q.index


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_alternating_sum_vanishes(seed):
    rng = random.Random(seed)
    f = random_trig_function(rng, 2, 3, offset=rng.uniform(-1, 1))
    beta = BetaForm((float(rng.randint(-1, 1)), float(rng.randint(-1, 1))))
    res = critical_points(f, beta, grid=40)
    if res.beta_morse:
        assert res.alternating_sum() == 0


def test_denser_grid_never_loses_points():
    rng = random.Random(3)
    f = random_trig_function(rng, 2, 4, max_freq=2)
    beta = BetaForm((1.0, 0.0))
    coarse = critical_points(f, beta, grid=24)
    fine = critical_points(f, beta, grid=48)
    assert len(fine.points) >= len(coarse.points)


def test_tighter_tolerance_keeps_points():
    res = critical_points(THREE_SIN, DTHETA)
    tight = critical_points(THREE_SIN, DTHETA, tol=1e-13)
    assert len(tight.points) == len(res.points)
    for p, q in zip(res.points, tight.points):
        assert circle_distance(p.location[0], q.location[0]) < 1e-6


def test_seed_order_does_not_matter():
    rng = random.Random(4)
    f = random_trig_function(rng, 2, 4)
    beta = BetaForm((0.0, 1.0))
    a = critical_points(f, beta, grid=32).to_dict()
    b = critical_points(f, beta, grid=32).to_dict()
    assert a == b
