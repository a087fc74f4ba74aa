"""Discrete evolution families generated by step matrices.

A family is encoded by a finite prefix A_0, ..., A_{L-1} followed by a
constant or periodic tail, so every supremum over the infinite index set
{(n, m): n >= m} reduces to a finite computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameter, NotExponentiallyBounded
from .linalg import (
    EIGEN_DIM_LIMIT,
    GelfandEstimate,
    Scaled,
    as_matrix,
    eigenvalues,
    op_norms,
    scaled_power,
    spectral_radius,
)

_EPS = np.finfo(float).eps
DEFAULT_MAX_WINDOW = 2**15


@dataclass(frozen=True, eq=False)
class ConstantTail:
    matrix: np.ndarray

    @property
    def matrices(self):
        return (self.matrix,)


@dataclass(frozen=True, eq=False)
class PeriodicTail:
    matrices: tuple


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """Step matrices A_n: ``prefix[n]`` for n < L, then the tail rule at index n - L."""

    prefix: tuple
    tail: ConstantTail | PeriodicTail

    def __post_init__(self):
        prefix = tuple(as_matrix(A) for A in self.prefix)
        if isinstance(self.tail, ConstantTail):
            tail = ConstantTail(as_matrix(self.tail.matrix))
        elif isinstance(self.tail, PeriodicTail):
            if len(self.tail.matrices) == 0:
                raise InvalidParameter("periodic tail needs at least one matrix")
            tail = PeriodicTail(tuple(as_matrix(A) for A in self.tail.matrices))
        else:
            raise InvalidParameter(f"unknown tail rule {self.tail!r}")
        dims = {A.shape[0] for A in prefix + tuple(tail.matrices)}
        if len(dims) != 1:
            raise InvalidParameter(f"all step matrices must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    @classmethod
    def constant(cls, T, prefix=()):
        return cls(tuple(prefix), ConstantTail(T))

    @classmethod
    def periodic(cls, matrices, prefix=()):
        return cls(tuple(prefix), PeriodicTail(tuple(matrices)))

    @classmethod
    def scalar(cls, gamma):
        return cls.constant([[gamma]])

    @property
    def dim(self) -> int:
        return self.tail.matrices[0].shape[0]

    @property
    def period(self) -> int:
        return len(self.tail.matrices)

    @property
    def is_autonomous(self) -> bool:
        return not self.prefix and self.period == 1

    def step(self, n: int) -> np.ndarray:
        if n < 0:
            raise DomainError(f"step index must be nonnegative, got {n}")
        L = len(self.prefix)
        if n < L:
            return self.prefix[n]
        return self.tail.matrices[(n - L) % self.period]


@dataclass(frozen=True)
class ExponentialBound:
    """||U(n, m)|| <= M exp(omega (n - m)) on all of n >= m.

    ``window`` is the finite horizon the supremum was reduced to.
    """

    omega: float
    M: float
    window: int = 0


class EvolutionFamily:
    """U(n, m) = A_{n-1} ... A_m with U(m, m) = I.

    Immutable; all caches are filled in the constructor.
    """

    def __init__(self, spec: GeneratorSpec, state_norm=2):
        self.spec = spec
        self.state_norm = state_norm
        self.dim = spec.dim
        self.L = len(spec.prefix)
        self.q = spec.period
        d = self.dim
        eye = np.eye(d, dtype=complex)
        tail = spec.tail.matrices
        # window[phase][r]: r consecutive tail steps starting at the given phase
        self._windows = []
        for phase in range(self.q):
            prods = [eye]
            for r in range(self.q):
                prods.append(tail[(phase + r) % self.q] @ prods[-1])
            self._windows.append(prods)
        self._monodromies = [w[self.q] for w in self._windows]
        self._to_L = [None] * (self.L + 1)
        self._to_L[self.L] = eye
        for m in range(self.L - 1, -1, -1):
            self._to_L[m] = self._to_L[m + 1] @ spec.prefix[m]
        self._all_steps = np.array(list(spec.prefix) + list(tail))

    @property
    def is_autonomous_scalar(self) -> bool:
        return self.dim == 1 and self.spec.is_autonomous

    def step(self, n: int) -> np.ndarray:
        return self.spec.step(n)

    def steps(self, indices) -> np.ndarray:
        idx = np.asarray(indices)
        mapped = np.where(idx < self.L, idx, self.L + (idx - self.L) % self.q)
        return self._all_steps[mapped]

    def monodromy(self, phase: int = 0) -> np.ndarray:
        return self._monodromies[phase % self.q]

    def phase_of(self, n: int) -> int:
        return (n - self.L) % self.q

    def tail_product(self, phase: int, t: int) -> np.ndarray:
        k, r = divmod(t, self.q)
        return self._windows[phase][r] @ np.linalg.matrix_power(self._monodromies[phase], k)

    def scaled_tail_product(self, phase: int, t: int) -> Scaled:
        k, r = divmod(t, self.q)
        return Scaled.of(self._windows[phase][r]) @ scaled_power(self._monodromies[phase], k)

    def propagator(self, n: int, m: int) -> np.ndarray:
        _check_pair(n, m)
        if n <= self.L:
            U = np.eye(self.dim, dtype=complex)
            for i in range(m, n):
                U = self.spec.prefix[i] @ U
            return U
        if m >= self.L:
            return self.tail_product(self.phase_of(m), n - m)
        return self.tail_product(0, n - self.L) @ self._to_L[m]

    def scaled_propagator(self, n: int, m: int) -> Scaled:
        _check_pair(n, m)
        if n <= self.L:
            return Scaled.of(self.propagator(n, m))
        if m >= self.L:
            return self.scaled_tail_product(self.phase_of(m), n - m)
        return self.scaled_tail_product(0, n - self.L) @ Scaled.of(self._to_L[m])

    def representative_starts(self) -> range:
        """Start indices m covering every distinct behavior of U(m + t, m)."""
        return range(self.L + self.q)

    def log_orbit_norms(self, starts, count: int) -> np.ndarray:
        """ln ||U(m + t, m)|| for each m in ``starts`` and 0 <= t < count."""
        starts = np.asarray(list(starts), dtype=int)
        B, d = len(starts), self.dim
        mats = np.empty((B, count, d, d), dtype=complex)
        logs = np.zeros((B, count))
        cur = np.broadcast_to(np.eye(d, dtype=complex), (B, d, d)).copy()
        scale = np.zeros(B)
        for t in range(count):
            mats[:, t] = cur
            logs[:, t] = scale
            cur = np.matmul(self.steps(starts + t), cur)
            s = np.abs(cur).reshape(B, -1).max(axis=1)
            alive = s > 0
            # power-of-two renormalization keeps subnormal products intact
            e = np.frexp(s)[1]
            cur = (np.ldexp(cur.real, -e[:, None, None]) + 1j * np.ldexp(cur.imag, -e[:, None, None]))
            scale = np.where(alive, scale + e * math.log(2.0), -np.inf)
        norms = op_norms(mats, self.state_norm)
        with np.errstate(divide="ignore"):
            return np.where(norms > 0, np.log(np.where(norms > 0, norms, 1.0)) + logs, -np.inf)


def _check_pair(n, m):
    if m < 0 or n < m:
        raise DomainError(f"propagator needs n >= m >= 0, got (n, m) = ({n}, {m})")


def _as_family(fam) -> EvolutionFamily:
    return fam if isinstance(fam, EvolutionFamily) else EvolutionFamily(fam)


def solve_cauchy(fam: EvolutionFamily, f) -> np.ndarray:
    """Solve x_{n+1} = A_n x_n + f_{n+1}, x_0 = 0. Same code path as the convolution."""
    from .convolution import apply_convolution

    return apply_convolution(fam, f)


# --- growth bounds -------------------------------------------------------------------------


@dataclass
class GrowthBound:
    """omega_0 in log-units per step together with a certified bracket."""

    value: float
    lower: float
    upper: float
    monodromy_radius: GelfandEstimate = field(repr=False)
    period: int = 1
    note: str = (
        "omega_0 = (1/q) ln r(P) for the tail monodromy P: tail pairs (m + kq, m) force "
        "omega >= (1/q) ln r(P), and the finite prefix only contributes a bounded factor"
    )

    @property
    def width(self) -> float:
        if self.lower == self.upper:
            return 0.0
        return self.upper - self.lower


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def growth_bound_oracle(fam: EvolutionFamily) -> GrowthBound:
    fam = _as_family(fam)
    P = fam.monodromy(0)
    est = spectral_radius(P, fam.state_norm)
    q = fam.q
    upper = est.log_upper / q
    if est.lower is not None:
        value = _log(float(np.max(np.abs(eigenvalues(P))))) / q
        lower = _log(est.lower) / q
    else:
        value = _log(est.value) / q
        lower = -math.inf
    value = min(value, upper)
    return GrowthBound(value=value, lower=lower, upper=upper, monodromy_radius=est, period=q)


def exponential_bound(fam: EvolutionFamily, omega: float, max_window: int = DEFAULT_MAX_WINDOW) -> ExponentialBound:
    """Certified M_omega = sup_{n >= m} exp(-omega (n - m)) ||U(n, m)||.

    Finds s with ||P_phi^s|| <= exp(omega q s) for every tail phase; then
    every pair whose span exceeds s*q can be shortened by a full block of s
    periods without increasing the weighted norm, so the supremum equals the
    maximum over a finite window. Raises NotExponentiallyBounded when the
    supremum is infinite or cannot be decided.
    """
    fam = _as_family(fam)
    omega = float(omega)
    if not math.isfinite(omega):
        raise InvalidParameter("omega must be finite")
    q, L, p = fam.q, fam.L, fam.state_norm
    s = 1
    found = None
    while s * q <= max_window:
        target = omega * q * s
        slack = 8 * _EPS * max(1.0, abs(target))
        if all(scaled_power(fam.monodromy(ph), s).log_norm(p) <= target + slack for ph in range(q)):
            found = s
            break
        s *= 2
    if found is None:
        est = spectral_radius(fam.monodromy(0), p)
        bracket = (est.lower, est.upper)
        if est.lower is not None and math.exp(omega * q) < est.lower:
            raise NotExponentiallyBounded(
                f"exp(omega*q) = {math.exp(omega * q):.6g} is below r(P) >= {est.lower:.6g}", "unbounded", bracket
            )
        raise NotExponentiallyBounded(
            f"could not certify a bound for omega={omega} within a window of {max_window} steps",
            "inconclusive",
            bracket,
        )
    window = found * q
    starts = list(fam.representative_starts())
    logs = fam.log_orbit_norms(starts, L + window)
    best = 0.0
    for b, m in enumerate(starts):
        count = max(m, L) + window - m
        t = np.arange(count)
        best = max(best, float(np.max(logs[b, :count] - omega * t)))
    return ExponentialBound(omega=omega, M=math.exp(best), window=window)


# --- evolution semigroup -------------------------------------------------------------------


def log_semigroup_power_norm(fam: EvolutionFamily, j: int) -> float:
    """ln ||T(j)|| where (T(j) f)(k) = U(k, k - j) f_{k-j}.

    T(j) moves each f_m to position m + j unchanged apart from U(m + j, m), so
    its norm on every sequence space is sup_m ||U(m + j, m)||, a maximum over
    the finitely many representative start indices.
    """
    fam = _as_family(fam)
    if j < 0:
        raise InvalidParameter("j must be nonnegative")
    return max(fam.scaled_propagator(m + j, m).log_norm(fam.state_norm) for m in fam.representative_starts())


def semigroup_power_norm(fam: EvolutionFamily, j: int) -> float:
    ln = log_semigroup_power_norm(fam, j)
    return math.exp(ln) if ln > -math.inf else 0.0


@dataclass
class SemigroupRadius:
    """Bracket for r(T(1)); both ends also kept in log form."""

    log_lower: float
    log_upper: float
    log_uppers: dict = field(default_factory=dict)

    @property
    def lower(self) -> float:
        return math.exp(self.log_lower) if self.log_lower > -math.inf else 0.0

    @property
    def upper(self) -> float:
        return math.exp(self.log_upper) if self.log_upper > -math.inf else 0.0

    def contains_log(self, value: float, slack: float = 0.0) -> bool:
        if value == -math.inf:
            return self.log_lower == -math.inf
        return self.log_lower - slack <= value <= self.log_upper + slack


def semigroup_spectral_radius(fam: EvolutionFamily, max_k: int = 40, tol: float = 1e-12) -> SemigroupRadius:
    """Gelfand bracket for the evolution semigroup generator T(1).

    Upper side: ||T(j)||^{1/j} for j = 1, 2, 4, ... (each a valid bound).
    Lower side: |lambda|^{1/q} for the dominant eigenvalue lambda of the tail
    monodromy, which is an approximate eigenvalue of T(1) (truncated
    eigen-sequences k -> lambda^{-k/q} U(k, L) v have vanishing relative
    residual).
    """
    fam = _as_family(fam)
    uppers = {}
    prev = None
    for k in range(max_k + 1):
        j = 2**k
        ln = log_semigroup_power_norm(fam, j)
        uppers[j] = ln / j if ln > -math.inf else -math.inf
        if uppers[j] == -math.inf:
            break
        if prev is not None and abs(uppers[j] - prev) < tol:
            break
        prev = uppers[j]
    log_upper = min(uppers.values())
    P = fam.monodromy(0)
    if fam.dim <= EIGEN_DIM_LIMIT:
        from .linalg import spectral_radius_lower

        log_lower = _log(spectral_radius_lower(P)) / fam.q
    else:
        log_lower = -math.inf
    log_lower = min(log_lower, log_upper)
    return SemigroupRadius(log_lower=log_lower, log_upper=log_upper, log_uppers=uppers)


def empirical_growth_rate(fam: EvolutionFamily, span: int) -> float:
    """max_m ln ||U(m + span, m)|| / span: an upper estimate of omega_0 at a finite span."""
    ln = log_semigroup_power_norm(fam, span)
    return ln / span if span > 0 else ln
