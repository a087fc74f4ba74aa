"""Dense complex matrix kernels.

Norms, Gelfand spectral-radius bounds and resolvents for small dense
matrices. The state space is C^d; the vector norm on it is selected by an
exponent ``p`` in {1, 2, inf} and operator norms are the induced ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceFailure,
    InsufficientBound,
    InvalidParameter,
    NumericFailure,
    ResolventSingular,
)

EIGEN_DIM_LIMIT = 64
COND_LIMIT = 1e14
_EPS = np.finfo(float).eps


def as_matrix(A) -> np.ndarray:
    """Validate and convert to a square complex array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidParameter(f"expected a nonempty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidParameter("matrix has non-finite entries")
    return M


def _check_p(p) -> float:
    p = float(p)
    if not p >= 1.0:
        raise InvalidParameter(f"norm exponent must be >= 1, got {p}")
    return p


def vec_norm(v, p=2) -> float:
    p = _check_p(p)
    v = np.asarray(v, dtype=complex).ravel()
    if v.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(v)))
    return float(np.linalg.norm(v, ord=p))


def op_norm(A, p=2, method="svd") -> float:
    """Induced operator norm for p in {1, 2, inf}.

    ``method="power"`` runs the seeded power iteration on A*A instead of the
    LAPACK singular value (only meaningful for p=2).
    """
    A = np.asarray(A, dtype=complex)
    p = _check_p(p)
    if p == 1:
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if math.isinf(p):
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if p != 2:
        raise InvalidParameter(f"operator norm only for p in {{1, 2, inf}}, got {p}")
    if method == "power":
        return power_iteration_norm(A)[0]
    return float(np.linalg.norm(A, 2))


def op_norms(stack, p=2) -> np.ndarray:
    """Vectorized induced norms of a stack of shape (..., d, d)."""
    S = np.asarray(stack, dtype=complex)
    p = _check_p(p)
    if p == 1:
        return np.abs(S).sum(axis=-2).max(axis=-1)
    if math.isinf(p):
        return np.abs(S).sum(axis=-1).max(axis=-1)
    if p != 2:
        raise InvalidParameter(f"operator norm only for p in {{1, 2, inf}}, got {p}")
    if S.shape[-1] == 1:
        return np.abs(S[..., 0, 0])
    return np.linalg.svd(S, compute_uv=False)[..., 0]


def power_iteration_norm(A, seed=0, rtol=1e-12, maxiter=10_000):
    """Largest singular value by power iteration on A*A.

    Returns ``(sigma, v)`` with ``v`` the final unit right vector. Raises
    ConvergenceFailure if successive estimates never agree to ``rtol``.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(maxiter):
        w = A.conj().T @ (A @ v)
        lam = np.linalg.norm(w)
        if lam == 0.0:
            return 0.0, v
        new_sigma = math.sqrt(lam)
        v = w / lam
        if abs(new_sigma - sigma) <= rtol * new_sigma:
            return float(np.linalg.norm(A @ v)), v
        sigma = new_sigma
    residual = abs(new_sigma - sigma) / new_sigma
    raise ConvergenceFailure("power iteration hit its iteration cap", last_iterate=v, residual=residual)


# --- log-scaled matrix products ------------------------------------------------------------


@dataclass
class Scaled:
    """A matrix stored as ``mat * exp(log_scale)`` with ``mat`` renormalized.

    Long products under/overflow quickly near the stability boundary; keeping
    a separate log scale avoids that. ``mat`` is the zero matrix with
    ``log_scale = -inf`` once the product vanishes.
    """

    mat: np.ndarray
    log_scale: float = 0.0

    @classmethod
    def of(cls, A) -> "Scaled":
        return cls(np.asarray(A, dtype=complex), 0.0).normalized()

    def normalized(self) -> "Scaled":
        s = float(np.max(np.abs(self.mat))) if self.mat.size else 0.0
        if s == 0.0 or self.log_scale == -math.inf:
            return Scaled(np.zeros_like(self.mat), -math.inf)
        if not math.isfinite(s):
            raise NumericFailure("overflow in scaled matrix product")
        # scale by an exact power of two so subnormal entries survive
        e = math.frexp(s)[1]
        mat = np.ldexp(self.mat.real, -e) + 1j * np.ldexp(self.mat.imag, -e)
        return Scaled(mat, self.log_scale + e * math.log(2.0))

    def __matmul__(self, other: "Scaled") -> "Scaled":
        return Scaled(self.mat @ other.mat, self.log_scale + other.log_scale).normalized()

    def log_norm(self, p=2) -> float:
        if self.log_scale == -math.inf:
            return -math.inf
        n = op_norm(self.mat, p)
        return math.log(n) + self.log_scale if n > 0 else -math.inf

    def value(self) -> np.ndarray:
        if self.log_scale == -math.inf:
            return np.zeros_like(self.mat)
        return self.mat * math.exp(self.log_scale)


def scaled_power(A, k: int) -> Scaled:
    """A^k by binary exponentiation in log-scaled form."""
    if k < 0:
        raise InvalidParameter("negative power")
    A = np.asarray(A, dtype=complex)
    result = Scaled(np.eye(A.shape[0], dtype=complex), 0.0)
    base = Scaled.of(A)
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def log_norm_power(A, k: int, p=2) -> float:
    """ln ||A^k|| (``-inf`` when A^k = 0)."""
    return scaled_power(A, k).log_norm(p)


# --- spectral radius -----------------------------------------------------------------------


@dataclass
class GelfandEstimate:
    """Result of :func:`spectral_radius`.

    ``upper_bounds`` maps m = 2^k to ||A^m||^{1/m}; each entry is a valid upper
    bound on r(A). ``log_upper_bounds`` holds the same numbers in log form
    (exact where the exponentials would round). ``lower`` is a certified lower
    bound from an eigenvalue computation when d <= 64, else None.
    """

    value: float
    upper_bounds: dict = field(default_factory=dict)
    log_upper_bounds: dict = field(default_factory=dict)
    lower: float | None = None

    @property
    def upper(self) -> float:
        return min(self.upper_bounds.values())

    @property
    def log_upper(self) -> float:
        return min(self.log_upper_bounds.values())


def spectral_radius(A, p=2, max_squarings=40, tol=1e-10) -> GelfandEstimate:
    """Gelfand estimate r(A) ~ ||A^(2^k)||^(2^-k) by renormalized repeated squaring."""
    A = as_matrix(A)
    cur = Scaled.of(A)
    ub, log_ub = {}, {}
    prev = None
    for k in range(max_squarings + 1):
        m = 2**k
        ln = cur.log_norm(p)
        if ln == -math.inf:
            ub[m], log_ub[m] = 0.0, -math.inf
            break
        if not math.isfinite(ln):
            raise NumericFailure("non-finite norm despite renormalization")
        log_ub[m] = ln / m
        ub[m] = math.exp(log_ub[m])
        if prev is not None and abs(ub[m] - prev) < tol:
            break
        prev = ub[m]
        if k < max_squarings:
            cur = cur @ cur
    value = min(ub.values())
    lower = spectral_radius_lower(A) if A.shape[0] <= EIGEN_DIM_LIMIT else None
    return GelfandEstimate(value=value, upper_bounds=ub, log_upper_bounds=log_ub, lower=lower)


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues (LAPACK Hessenberg QR); exact diagonal for triangular input."""
    A = as_matrix(A)
    if A.shape[0] > EIGEN_DIM_LIMIT:
        raise NumericFailure(f"eigen-solver limited to d <= {EIGEN_DIM_LIMIT}")
    if np.all(np.tril(A, -1) == 0) or np.all(np.triu(A, 1) == 0):
        return np.diag(A).copy()
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigenvalue computation failed: {exc}") from exc


def spectral_radius_lower(A) -> float:
    """Lower bound on r(A) from the eigenvalues, shaved by a backward-error margin."""
    A = as_matrix(A)
    lam = eigenvalues(A)
    r = float(np.max(np.abs(lam)))
    if np.all(np.tril(A, -1) == 0) or np.all(np.triu(A, 1) == 0):
        return r
    slack = 64 * _EPS * A.shape[0] * float(np.linalg.norm(A))
    return max(0.0, r - slack)


def is_normal(A, rtol=1e-13) -> bool:
    A = np.asarray(A, dtype=complex)
    C = A @ A.conj().T - A.conj().T @ A
    return float(np.linalg.norm(C)) <= rtol * max(1.0, float(np.linalg.norm(A)) ** 2)


# --- resolvents ----------------------------------------------------------------------------


def resolvent_closed(z, A) -> np.ndarray:
    """(zI - A)^{-1} by LU with partial pivoting."""
    A = as_matrix(A)
    B = complex(z) * np.eye(A.shape[0]) - A
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ResolventSingular(f"zI - A is singular or ill-conditioned (cond={cond:.3g}) at z={z}")
    return np.linalg.solve(B, np.eye(A.shape[0], dtype=complex))


def _nilpotency_index(A) -> int | None:
    d = A.shape[0]
    P = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        P = P @ A
        if not np.any(P):
            return k
    return None


def resolvent_series(z, A, K: int, bound=None, p=2):
    """Partial Neumann sum sum_{n<=K} A^n / z^(n+1) and a bound on the omitted tail.

    The tail is majorized by ``M e^{omega n}`` (an :class:`ExponentialBound`
    for the constant family A) with e^omega < |z|. When ``bound`` is None the
    tightest one available is searched for.
    """
    from .family import EvolutionFamily, GeneratorSpec, exponential_bound
    from .errors import NotExponentiallyBounded

    A = as_matrix(A)
    z = complex(z)
    if K < 0:
        raise InvalidParameter("K must be nonnegative")
    d = A.shape[0]
    partial = np.zeros((d, d), dtype=complex)
    P = np.eye(d, dtype=complex)
    for n in range(K + 1):
        partial += P / z ** (n + 1)
        P = P @ A

    idx = _nilpotency_index(A)
    if idx is not None:
        # A^n = 0 for n >= idx: the tail is a finite, exactly summable remainder
        tail = sum(op_norm(np.linalg.matrix_power(A, n), p) / abs(z) ** (n + 1) for n in range(K + 1, idx))
        return partial, float(tail)

    if bound is None:
        fam = EvolutionFamily(GeneratorSpec.constant(A), state_norm=p)
        est = spectral_radius(A, p)
        if est.upper >= abs(z):
            raise InsufficientBound(f"no certified spectral bound below |z|={abs(z)}")
        candidates = [est.log_upper] + [
            math.log(est.upper + t * (abs(z) - est.upper)) for t in (0.05, 0.25, 0.5)
        ]
        best = math.inf
        for omega in candidates:
            try:
                b = exponential_bound(fam, omega)
            except NotExponentiallyBounded:
                continue
            rho = math.exp(b.omega) / abs(z)
            tail = b.M / abs(z) * rho ** (K + 1) / (1 - rho)
            best = min(best, tail)
        if best == math.inf:
            raise InsufficientBound(f"could not certify an exponential bound below |z|={abs(z)}")
        return partial, float(best)

    if math.exp(bound.omega) >= abs(z):
        raise InsufficientBound("stored exponential bound does not satisfy e^omega < |z|")
    rho = math.exp(bound.omega) / abs(z)
    return partial, float(bound.M / abs(z) * rho ** (K + 1) / (1 - rho))


def resolvent_distance_check(z, A, tol=1e-9):
    """lhs = ||R(z, A)||_2 * dist(z, sigma(A)); the verdict is lhs >= 1 - tol."""
    A = as_matrix(A)
    R = resolvent_closed(z, A)
    dist = float(np.min(np.abs(eigenvalues(A) - complex(z))))
    lhs = op_norm(R, 2) * dist
    return lhs, bool(lhs >= 1 - tol)
