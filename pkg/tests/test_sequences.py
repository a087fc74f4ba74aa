import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtvstab.errors import DomainError, InvalidParameter, InvalidSequence
from dtvstab.sequences import (
    SpaceSpec,
    as_sequence,
    conjugate_exponent,
    dual_pair,
    dual_vector,
    mixed_norm,
    pad,
    random_unit,
    seq_norm,
)

SPACES = [SpaceSpec.lp(1), SpaceSpec.lp(2), SpaceSpec.lp(3.5), SpaceSpec("linf"), SpaceSpec("c0")]


def test_space_parsing():
    assert SpaceSpec.parse("lp:2") == SpaceSpec.lp(2)
    assert SpaceSpec.parse("c0").exponent == math.inf
    assert str(SpaceSpec.parse("linf")) == "linf"
    for bad in ("lp:0.5", "lp:x", "l2", "lp:inf"):
        with pytest.raises(InvalidParameter):
            SpaceSpec.parse(bad)
    assert conjugate_exponent(1) == math.inf and conjugate_exponent(2) == 2


def test_seq_norm_examples():
    imp = np.zeros((5, 2))
    imp[3] = [3, 4]
    for sp in SPACES:
        assert seq_norm(imp, sp) == pytest.approx(5.0)
        assert seq_norm(np.zeros((4, 1)), sp) == 0
    f = np.array([0, 1, 1, 1.0])
    assert seq_norm(f, SpaceSpec.lp(1)) == 3
    assert seq_norm(f, SpaceSpec("linf")) == 1


def test_first_entry_convention():
    with pytest.raises(InvalidSequence):
        as_sequence([1.0, 2.0])
    with pytest.raises(InvalidSequence):
        as_sequence([0.0, float("inf")])
    assert as_sequence([0, 1, 2]).shape == (3, 1)


def test_dual_pair_examples():
    imp = np.array([0, 1.0])
    assert dual_pair(imp, imp) == 1
    assert dual_pair(np.zeros(2), imp) == 0
    with pytest.raises(DomainError):
        dual_pair(np.zeros(3), imp)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 20), st.integers(1, 3), st.sampled_from([1, 1.5, 2, 4, math.inf]), st.sampled_from([1, 2, math.inf]), st.integers(0, 2**31))
def test_holder_and_dual_vector(N, d, p, s, seed):
    rng = np.random.default_rng(seed)
    f = np.zeros((N + 1, d), dtype=complex)
    h = np.zeros_like(f)
    f[1:] = rng.standard_normal((N, d)) + 1j * rng.standard_normal((N, d))
    h[1:] = rng.standard_normal((N, d)) + 1j * rng.standard_normal((N, d))
    pd, sd = conjugate_exponent(p), conjugate_exponent(s)
    assert abs(dual_pair(h, f)) <= mixed_norm(h, pd, sd) * mixed_norm(f, p, s) * (1 + 1e-12)
    g = dual_vector(f, p, s)
    assert dual_pair(g, f).real == pytest.approx(mixed_norm(f, p, s), rel=1e-10)
    assert mixed_norm(g, pd, sd) == pytest.approx(1.0, rel=1e-10)


def test_random_unit():
    for sp in SPACES:
        f = random_unit(sp, 2, 10, seed=5)
        assert abs(seq_norm(f, sp) - 1) < 1e-12
        assert not np.any(f[0])
        np.testing.assert_array_equal(f, random_unit(sp, 2, 10, seed=5))
        assert np.any(f != random_unit(sp, 2, 10, seed=6))


def test_pad_is_isometric():
    f = random_unit(SpaceSpec.lp(2), 2, 6, seed=1)
    g = pad(f, 20)
    assert g.shape == (21, 2)
    for sp in SPACES:
        assert seq_norm(g, sp) == pytest.approx(seq_norm(f, sp))
