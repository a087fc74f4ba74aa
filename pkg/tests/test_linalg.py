import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dtvstab.errors import InvalidParameter, ResolventSingular
from dtvstab.linalg import (
    Scaled,
    op_norm,
    power_iteration_norm,
    resolvent_closed,
    resolvent_distance_check,
    resolvent_series,
    scaled_power,
    spectral_radius,
    vec_norm,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
matrices = st.integers(1, 4).flatmap(lambda d: arrays(np.float64, (d, d), elements=finite))


def test_vec_norm_examples():
    assert vec_norm([3, 4], 2) == 5
    assert vec_norm([1, -1], math.inf) == 1
    assert vec_norm(np.zeros(3), 1) == 0
    with pytest.raises(InvalidParameter):
        vec_norm([1, 2], 0.5)


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_op_norm_identity(p):
    assert op_norm(np.eye(3), p) == pytest.approx(1.0)


def test_op_norm_examples():
    assert op_norm(np.diag([0.5]), 2) == pytest.approx(0.5)
    assert op_norm([[0, 1], [0, 0]], 2) == pytest.approx(1.0)
    A = np.array([[1, -2], [3, 4]])
    assert op_norm(A, 1) == 6
    assert op_norm(A, math.inf) == 7


def test_power_iteration_agrees_with_svd(rng):
    for _ in range(5):
        A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        sigma, v = power_iteration_norm(A, seed=3)
        assert sigma == pytest.approx(np.linalg.norm(A, 2), rel=1e-6)
        assert sigma <= np.linalg.norm(A, 2) * (1 + 1e-12)
        assert op_norm(A, 2, method="power") == pytest.approx(op_norm(A, 2), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(matrices, matrices)
def test_op_norm_submultiplicative(A, B):
    if A.shape != B.shape:
        return
    for p in (1, 2, math.inf):
        assert op_norm(A @ B, p) <= op_norm(A, p) * op_norm(B, p) * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_spectral_radius_below_every_gelfand_bound(A):
    est = spectral_radius(A)
    r = max(abs(np.linalg.eigvals(A)))
    for ub in est.upper_bounds.values():
        assert est.value <= ub + 1e-9
        assert r <= ub * (1 + 1e-9) + 1e-12
    assert est.lower <= r * (1 + 1e-9) + 1e-12


def test_spectral_radius_examples():
    est = spectral_radius(np.diag([0.5]))
    assert all(ub == pytest.approx(0.5) for ub in est.upper_bounds.values())
    assert spectral_radius([[0.5, 1], [0, 0.5]]).value == pytest.approx(0.5, abs=1e-6)
    assert spectral_radius(np.zeros((2, 2))).value == 0


def test_scaled_power_matches_matrix_power(rng):
    A = rng.standard_normal((3, 3))
    for k in (0, 1, 5, 13):
        np.testing.assert_allclose(scaled_power(A, k).value(), np.linalg.matrix_power(A, k), rtol=1e-10, atol=1e-12)


def test_scaled_survives_underflow():
    S = scaled_power(np.diag([1e-3]), 400)
    assert S.log_norm() == pytest.approx(400 * math.log(1e-3))
    assert Scaled.of(np.zeros((2, 2))).log_norm() == -math.inf


def test_resolvent_closed_examples():
    np.testing.assert_allclose(resolvent_closed(2, np.diag([0.5, 0.5])), np.diag([2 / 3, 2 / 3]))
    np.testing.assert_allclose(resolvent_closed(1, np.diag([0.5])), [[2.0]])
    with pytest.raises(ResolventSingular):
        resolvent_closed(0.5, np.diag([0.5]))


def test_resolvent_series_examples():
    partial, tail = resolvent_series(2, np.diag([0.5]), 10)
    exact = 2 / 3
    assert abs(partial[0, 0] - exact) <= tail
    assert tail <= 0.5 * 0.25**11 / 0.75 * (1 + 1e-12)
    partial, tail = resolvent_series(2, np.zeros((1, 1)), 0)
    assert partial[0, 0] == 0.5 and tail == 0
    partial, tail = resolvent_series(10, np.diag([0.5]), 0)
    assert partial[0, 0] == pytest.approx(0.1)
    assert abs(1 / 9.5 - partial[0, 0]) <= tail
    assert tail == pytest.approx(1 / 190)


@settings(max_examples=40, deadline=None)
@given(matrices, st.floats(1.1, 5), st.floats(0, 2 * math.pi))
def test_resolvent_series_tail_is_certified(A, radius, angle):
    r = max(abs(np.linalg.eigvals(A)))
    z = (r + radius) * np.exp(1j * angle)
    partial, tail = resolvent_series(z, A, 25)
    exact = np.linalg.inv(z * np.eye(A.shape[0]) - A)
    assert np.linalg.norm(exact - partial, 2) <= tail * (1 + 1e-8) + 1e-10 * np.linalg.norm(exact, 2)


def test_resolvent_distance_examples():
    assert resolvent_distance_check(1, np.diag([0.5])) == (pytest.approx(1.0), True)
    assert resolvent_distance_check(2, np.diag([0.5]))[0] == pytest.approx(1.0)
    lhs, ok = resolvent_distance_check(1, [[0.5, 1], [0, 0.5]])
    R = np.linalg.inv(np.eye(2) - np.array([[0.5, 1], [0, 0.5]]))
    assert lhs == pytest.approx(np.linalg.norm(R, 2) * 0.5) and lhs > 1 and ok


@settings(max_examples=50, deadline=None)
@given(matrices, st.floats(0.05, 3), st.floats(0, 2 * math.pi))
def test_resolvent_distance_inequality(A, gap, angle):
    r = max(abs(np.linalg.eigvals(A)))
    z = (r + gap) * np.exp(1j * angle)
    try:
        lhs, ok = resolvent_distance_check(z, A)
    except ResolventSingular:
        return
    assert ok
