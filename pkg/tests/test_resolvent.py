import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtvstab.convolution import apply_convolution, conv_norm_bracket
from dtvstab.errors import InvalidParameter
from dtvstab.family import EvolutionFamily, GeneratorSpec
from dtvstab.resolvent import (
    disk_bound_check,
    elementary_inequality_check,
    elementary_margins,
    resolvent_circle_bound,
    resolvent_norm_estimate,
    rotate_sequence,
    rotation_identity_check,
    semigroup_orbit,
    truncated_semigroup_resolvent,
    unimodular_grid,
)
from dtvstab.sequences import SpaceSpec, random_unit, seq_norm

C0 = SpaceSpec("c0")


def test_rotate_examples(rng):
    f = np.array([0, 1, 1.0])
    np.testing.assert_array_equal(rotate_sequence(f, 1), f[:, None])
    np.testing.assert_allclose(rotate_sequence(f, -1)[:, 0], [0, -1, 1], atol=1e-15)
    g = random_unit(SpaceSpec.lp(2), 2, 15, seed=2)
    for sp in (SpaceSpec.lp(1), SpaceSpec.lp(2), SpaceSpec("linf")):
        assert seq_norm(rotate_sequence(g, 1j), sp) == pytest.approx(seq_norm(g, sp), rel=1e-14)
    with pytest.raises(InvalidParameter):
        rotate_sequence(f, 2)


def test_orbit_is_shifted_semigroup(jordan):
    f = random_unit(SpaceSpec.lp(2), 2, 10, seed=0)
    orbit = semigroup_orbit(jordan, f)
    for k in range(4):
        for n in range(k + 1, 11):
            np.testing.assert_allclose(orbit[k, n], jordan.propagator(n, n - k) @ f[n - k], atol=1e-13)
        assert not np.any(orbit[k, :k])


def test_truncated_resolvent_examples(half, zero_gen):
    f = random_unit(SpaceSpec.lp(2), 1, 8, seed=3)
    np.testing.assert_allclose(truncated_semigroup_resolvent(zero_gen, 2, f), f / 2)
    imp = np.zeros((12, 1))
    imp[1] = 1
    out = truncated_semigroup_resolvent(half, 1, imp)
    np.testing.assert_allclose(out[1:, 0], 0.5 ** np.arange(11))


def test_rotation_identity_examples(half, zero_gen):
    f = random_unit(SpaceSpec.lp(2), 1, 32, seed=9)
    assert rotation_identity_check(half, 1j, f) < 1e-12
    assert rotation_identity_check(zero_gen, np.exp(0.3j), f) <= 1e-15
    lhs = truncated_semigroup_resolvent(half, 1, f)
    np.testing.assert_allclose(lhs, apply_convolution(half, f), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(0, 2 * math.pi), st.integers(1, 3))
def test_rotation_identity_random(seed, angle, d):
    rng = np.random.default_rng(seed)
    tail = [rng.standard_normal((d, d)) * 0.5 for _ in range(2)]
    fam = EvolutionFamily(GeneratorSpec.periodic(tail, prefix=[rng.standard_normal((d, d))]))
    f = random_unit(SpaceSpec.lp(2), d, 20, seed=seed)
    assert rotation_identity_check(fam, np.exp(1j * angle), f) <= 1e-10 * max(1.0, np.abs(semigroup_orbit(fam, f)).max())


def test_resolvent_norm_examples(half, zero_gen):
    assert resolvent_norm_estimate(half, C0, 1, 64) == pytest.approx(2.0, abs=1e-15)
    assert resolvent_norm_estimate(zero_gen, C0, 1, 16) <= 1 + 1e-12
    est = resolvent_norm_estimate(half, C0, 10, 32)
    assert est == pytest.approx(1 / 10 / (1 - 0.05))


def test_circle_bound(jordan):
    cb = resolvent_circle_bound(jordan, SpaceSpec.lp(2), grid=unimodular_grid(8), N=32)
    assert cb.verdict
    assert cb.max_estimate <= cb.c_upper + 1e-9


def test_disk_examples(half, zero_gen, two_eighth):
    d = disk_bound_check(half, C0)
    assert d.status == "confirmed"
    assert d.equality_gap is not None and d.equality_gap <= 1e-12
    assert abs(d.r_upper - (1 - 1 / d.c_upper)) <= 1e-12
    z = disk_bound_check(zero_gen, C0)
    assert z.r_upper == 0.0 and z.margin == pytest.approx(0.0)
    p = disk_bound_check(two_eighth, C0)
    assert p.r_lower == pytest.approx(0.5) and p.margin >= -p.slack


def test_elementary_examples():
    m = elementary_margins([0.5, math.exp(-1)])
    assert m[0] == pytest.approx(2 - 1 / math.log(2))
    assert m[1] == pytest.approx(1 / (1 - math.exp(-1)) - 1)
    assert elementary_inequality_check() >= -1e-12
    with pytest.raises(InvalidParameter):
        elementary_inequality_check([0.5, 1.0])


def test_elementary_limit_near_one():
    # the margin tends to 1/2, not 0; the relative gap closes like (1 - r) / 2
    r = 1 - 1e-6
    m = float(elementary_margins([r])[0])
    assert m == pytest.approx(0.5, abs=1e-6)
    assert (1 - r) * m < 1e-3


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-9, 1 - 1e-9))
def test_elementary_nonnegative(r):
    assert elementary_margins([r])[0] >= -1e-12


def test_c_bracket_feeds_disk(jordan):
    b = conv_norm_bracket(jordan, SpaceSpec.lp(2), schedule=[16, 64])
    d = disk_bound_check(jordan, SpaceSpec.lp(2), bracket=b)
    assert d.status in ("confirmed", "within-slack")
