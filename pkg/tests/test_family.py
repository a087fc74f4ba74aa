import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dtvstab.errors import DomainError, InvalidParameter, NotExponentiallyBounded
from dtvstab.family import (
    EvolutionFamily,
    GeneratorSpec,
    exponential_bound,
    growth_bound_oracle,
    semigroup_power_norm,
    semigroup_spectral_radius,
    solve_cauchy,
)

entries = st.floats(-1.5, 1.5, allow_nan=False)


@st.composite
def specs(draw, max_dim=3):
    d = draw(st.integers(1, max_dim))
    mat = st.lists(entries, min_size=d * d, max_size=d * d).map(lambda v: np.array(v).reshape(d, d))
    prefix = draw(st.lists(mat, max_size=3))
    tail = draw(st.lists(mat, min_size=1, max_size=3))
    return prefix, tail


def test_propagator_examples(half, two_eighth):
    np.testing.assert_array_equal(half.propagator(7, 7), np.eye(1))
    assert half.propagator(5, 2)[0, 0] == pytest.approx(0.125)
    assert two_eighth.propagator(2, 0)[0, 0] == pytest.approx(0.25)
    assert two_eighth.propagator(3, 1)[0, 0] == pytest.approx(0.25)
    assert two_eighth.propagator(3, 0)[0, 0] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        half.propagator(1, 2)


@settings(max_examples=60, deadline=None)
@given(specs(), st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
def test_cocycle_law(spec, a, b, c):
    prefix, tail = spec
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
    m, p, n = sorted((a, b, c))
    lhs = fam.propagator(n, m)
    rhs = fam.propagator(n, p) @ fam.propagator(p, m)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * max(1.0, np.abs(lhs).max()))
    steps = oracles.steps_of(prefix, tail, n + 1)
    np.testing.assert_allclose(lhs, oracles.product(steps, n, m), rtol=1e-9, atol=1e-9 * max(1.0, np.abs(lhs).max()))


def test_spec_validation():
    with pytest.raises(InvalidParameter):
        GeneratorSpec.periodic([])
    with pytest.raises(InvalidParameter):
        GeneratorSpec.constant(np.eye(2), prefix=[np.eye(3)])
    with pytest.raises(InvalidParameter):
        GeneratorSpec.scalar(float("nan"))
    with pytest.raises(DomainError):
        GeneratorSpec.scalar(0.5).step(-1)


def test_solve_cauchy_examples(half, rng):
    assert not np.any(solve_cauchy(half, np.zeros((6, 1))))
    f = np.zeros((6, 1))
    f[1] = 1
    x = solve_cauchy(half, f)
    np.testing.assert_allclose(x[:, 0], [0, 1, 0.5, 0.25, 0.125, 0.0625])
    prefix = [rng.standard_normal((2, 2)) for _ in range(2)]
    tail = [rng.standard_normal((2, 2)) * 0.5 for _ in range(3)]
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
    f = np.zeros((30, 2), dtype=complex)
    f[1:] = rng.standard_normal((29, 2))
    x = solve_cauchy(fam, f)
    steps = oracles.steps_of(prefix, tail, 30)
    for n in range(29):
        assert np.abs(x[n + 1] - steps[n] @ x[n] - f[n + 1]).max() < 1e-12
    np.testing.assert_allclose(x, oracles.recurrence_solution(steps, f), atol=1e-12)


def test_exponential_bound_examples(half, two_eighth):
    assert exponential_bound(half, math.log(0.5)).M == pytest.approx(1.0)
    assert exponential_bound(half, 0.0).M == pytest.approx(1.0)
    b = exponential_bound(two_eighth, math.log(0.5))
    assert b.M == pytest.approx(4.0)
    steps = oracles.steps_of([], [[[2.0]], [[0.125]]], 120)
    assert oracles.sup_weighted_norm(steps, math.log(0.5), 50, range(2)) == pytest.approx(4.0)


def test_exponential_bound_unbounded(half):
    fam = EvolutionFamily(GeneratorSpec.scalar(2.0))
    with pytest.raises(NotExponentiallyBounded) as exc:
        exponential_bound(fam, 0.1)
    assert exc.value.status == "unbounded"
    with pytest.raises(NotExponentiallyBounded):
        exponential_bound(half, math.log(0.4))


@settings(max_examples=40, deadline=None)
@given(specs(max_dim=2), st.floats(0.05, 1.0))
def test_exponential_bound_dominates_brute_force(spec, gap):
    prefix, tail = spec
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
    g = growth_bound_oracle(fam)
    omega = (g.upper if g.upper > -30 else -30.0) + gap
    try:
        b = exponential_bound(fam, omega)
    except NotExponentiallyBounded:
        return
    steps = oracles.steps_of(prefix, tail, 200)
    brute = oracles.sup_weighted_norm(steps, omega, 60, range(len(prefix) + len(tail) + 2))
    assert brute <= b.M * (1 + 1e-9)


def test_growth_bound_examples(half, two_eighth):
    assert growth_bound_oracle(half).value == pytest.approx(math.log(0.5))
    assert growth_bound_oracle(two_eighth).value == pytest.approx(math.log(0.5))
    nil = EvolutionFamily(GeneratorSpec.constant([[0, 1], [0, 0]]))
    assert growth_bound_oracle(nil).value == -math.inf


def test_growth_bound_matches_brute_force_rates(rng):
    for seed in range(5):
        r = np.random.default_rng(seed)
        tail = [r.standard_normal((2, 2)) for _ in range(2)]
        prefix = [r.standard_normal((2, 2))]
        fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
        g = growth_bound_oracle(fam)
        steps = oracles.steps_of(prefix, tail, 420)
        rate = oracles.brute_growth_rate(steps, 400, range(3))
        # finite-span rates approach omega_0 at speed O(1/span)
        assert abs(rate - g.value) < 0.05
        assert g.lower <= g.value <= g.upper


def test_semigroup_power_norm_examples(half, two_eighth):
    assert semigroup_power_norm(half, 0) == 1.0
    for j in range(1, 8):
        assert semigroup_power_norm(half, j) == pytest.approx(0.5**j)
    assert semigroup_power_norm(two_eighth, 1) == pytest.approx(2.0)
    assert semigroup_power_norm(two_eighth, 2) == pytest.approx(0.25)


@settings(max_examples=30, deadline=None)
@given(specs(max_dim=2), st.integers(0, 9))
def test_semigroup_power_norm_matches_shift_oracle(spec, j):
    prefix, tail = spec
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
    steps = oracles.steps_of(prefix, tail, 40)
    brute = oracles.shift_power_norm(steps, j, range(len(prefix) + len(tail) + 6))
    assert semigroup_power_norm(fam, j) == pytest.approx(brute, rel=1e-9, abs=1e-300)


def test_semigroup_spectral_radius_examples(half, two_eighth):
    r = semigroup_spectral_radius(half)
    assert r.lower == r.upper == pytest.approx(0.5)
    r = semigroup_spectral_radius(two_eighth)
    assert r.log_uppers[2] == pytest.approx(math.log(0.5))
    assert r.lower <= 0.5 + 1e-12 and r.upper >= 0.5 - 1e-12
    nil = EvolutionFamily(GeneratorSpec.constant([[0, 1], [0, 0]]))
    r = semigroup_spectral_radius(nil)
    assert r.lower == r.upper == 0.0


@settings(max_examples=40, deadline=None)
@given(specs())
def test_semigroup_radius_bracket_contains_growth_bound(spec):
    prefix, tail = spec
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=prefix))
    g = growth_bound_oracle(fam)
    r = semigroup_spectral_radius(fam)
    if g.value == -math.inf:
        assert r.log_lower == -math.inf
        return
    width = r.log_upper - r.log_lower
    assert r.log_lower - 1e-9 <= g.value <= r.log_upper + width + 1e-6


def test_state_norm_variants():
    fam1 = EvolutionFamily(GeneratorSpec.constant([[0.5, 1], [0, 0.5]]), state_norm=1)
    fami = EvolutionFamily(GeneratorSpec.constant([[0.5, 1], [0, 0.5]]), state_norm=math.inf)
    assert semigroup_power_norm(fam1, 1) == pytest.approx(1.5)
    assert semigroup_power_norm(fami, 1) == pytest.approx(1.5)
    assert growth_bound_oracle(fam1).value == pytest.approx(math.log(0.5), abs=1e-9)
