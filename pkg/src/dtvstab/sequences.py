"""Truncated X-valued sequence spaces with first entry zero.

A truncated sequence is an array of shape ``(N + 1, d)``; row k holds f_k.
On truncations the sup-norm spaces l^inf_0 and c^0_0 coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameter, InvalidSequence


@dataclass(frozen=True)
class SpaceSpec:
    kind: str  # "lp", "linf" or "c0"
    p: float | None = None

    def __post_init__(self):
        if self.kind == "lp":
            try:
                p = float(self.p)
            except (TypeError, ValueError):
                raise InvalidParameter(f"l^p space needs a numeric p, got {self.p!r}") from None
            if isinstance(self.p, bool) or not 1 <= p < math.inf:
                raise InvalidParameter(f"l^p space needs 1 <= p < inf, got {self.p}")
            object.__setattr__(self, "p", p)
        elif self.kind in ("linf", "c0"):
            object.__setattr__(self, "p", None)
        else:
            raise InvalidParameter(f"unknown space kind {self.kind!r}")

    @classmethod
    def lp(cls, p):
        return cls("lp", p)

    @classmethod
    def parse(cls, text: str) -> "SpaceSpec":
        """Parse ``lp:2``, ``linf`` or ``c0``."""
        text = text.strip().lower()
        if text.startswith("lp:"):
            return cls("lp", text[3:])
        return cls(text)

    @property
    def exponent(self) -> float:
        return math.inf if self.p is None else self.p

    @property
    def dual_exponent(self) -> float:
        return conjugate_exponent(self.exponent)

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{self.p:g}"
        return self.kind


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def as_sequence(f, dim: int | None = None, check_first=True) -> np.ndarray:
    """Validate a truncated sequence; 1-d input is read as a scalar sequence."""
    a = np.asarray(f, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1:
        raise InvalidSequence(f"expected shape (N+1, d), got {a.shape}")
    if dim is not None and a.shape[1] != dim:
        raise DomainError(f"sequence has state dimension {a.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(a)):
        raise InvalidSequence("sequence has non-finite entries")
    if check_first and np.any(a[0] != 0):
        raise InvalidSequence("first entry must be zero (f_0 = 0)")
    return a


def _block_norms(a: np.ndarray, state_norm) -> np.ndarray:
    s = float(state_norm)
    if math.isinf(s):
        return np.abs(a).max(axis=1)
    return np.linalg.norm(a, ord=s, axis=1)


def mixed_norm(a, p, state_norm=2) -> float:
    """(sum_k ||a_k||^p)^(1/p) with the state norm inside; p may be inf."""
    b = _block_norms(np.asarray(a), state_norm)
    if b.size == 0:
        return 0.0
    if math.isinf(p):
        return float(b.max())
    return float(np.linalg.norm(b, ord=p))


def seq_norm(f, space: SpaceSpec, state_norm=2) -> float:
    f = as_sequence(f, check_first=False)
    return mixed_norm(f, space.exponent, state_norm)


def dual_pair(h, f) -> complex:
    """sum_k <h_k, f_k>, conjugate-linear in h."""
    h = as_sequence(h, check_first=False)
    f = as_sequence(f, check_first=False)
    if h.shape != f.shape:
        raise DomainError(f"shape mismatch {h.shape} vs {f.shape}")
    return complex(np.vdot(h, f))


def dual_vector(y, p, state_norm=2) -> np.ndarray:
    """Norming functional of y for the mixed (p, state_norm) norm.

    Returns g with dual_pair(g, y) = ||y|| and unit dual norm (exponents
    conjugated on both levels). Ties go to the first index.
    """
    y = np.asarray(y, dtype=complex)
    s = float(state_norm)
    b = _block_norms(y, s)
    g = np.zeros_like(y)
    total = mixed_norm(y, p, s)
    if total == 0:
        return g
    absy = np.abs(y)
    phase = np.where(absy > 0, np.exp(1j * np.angle(y)), 0)
    if s == 2:
        inner = np.where(b[:, None] > 0, y / np.where(b > 0, b, 1)[:, None], 0)
    elif s == 1:
        inner = phase
    elif math.isinf(s):
        inner = np.zeros_like(y)
        rows = np.arange(y.shape[0])
        cols = np.argmax(absy, axis=1)
        inner[rows, cols] = phase[rows, cols]
        inner[b == 0] = 0
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            inner = np.where(
                b[:, None] > 0, phase * (absy / np.where(b > 0, b, 1)[:, None]) ** (s - 1), 0
            )
    if p == 1:
        w = (b > 0).astype(float)
    elif math.isinf(p):
        w = np.zeros_like(b)
        w[int(np.argmax(b))] = 1.0
    else:
        w = (b / total) ** (p - 1)
    return w[:, None] * inner


def random_unit(space: SpaceSpec, d: int, N: int, seed: int, state_norm=2) -> np.ndarray:
    """Seeded complex Gaussian sequence with f_0 = 0, normalized in ``space``."""
    if N < 1:
        raise InvalidParameter("N must be >= 1")
    rng = np.random.default_rng(seed)
    f = np.zeros((N + 1, d), dtype=complex)
    f[1:] = rng.standard_normal((N, d)) + 1j * rng.standard_normal((N, d))
    return f / seq_norm(f, space, state_norm)


def pad(f, N: int) -> np.ndarray:
    """Zero-pad a truncated sequence to length N + 1."""
    f = np.asarray(f)
    if N + 1 < f.shape[0]:
        raise DomainError("cannot pad to a shorter length")
    out = np.zeros((N + 1, f.shape[1]), dtype=complex)
    out[: f.shape[0]] = f
    return out
