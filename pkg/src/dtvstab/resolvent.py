"""Resolvent-side checks for the evolution semigroup generator T(1).

On a truncated sequence space T(1) is nilpotent, so every statement about
its spectrum is routed through the Gelfand brackets of
:func:`dtvstab.family.semigroup_spectral_radius`; truncations are only used
for norms of explicit operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convolution import (
    _backward,
    _boyd,
    _forward,
    apply_convolution,
    conv_norm_bracket,
    dense_oracle_matrix,
    DENSE_WORKING_LIMIT,
)
from .errors import InvalidParameter, TheoremViolation
from .family import EvolutionFamily, _as_family, semigroup_spectral_radius
from .sequences import SpaceSpec, as_sequence, mixed_norm, random_unit

RADIAL_POINTS = (1.25, 2.0, 10.0)


def unimodular_grid(count: int = 64) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def _unit(z, tol=1e-12) -> complex:
    z = complex(z)
    if abs(abs(z) - 1.0) > tol:
        raise InvalidParameter(f"|z| must be 1, got {abs(z)!r}")
    return z / abs(z)


def rotate_sequence(f, z) -> np.ndarray:
    """g_j = z^j f_j for unimodular z (an isometry of every space here)."""
    z = _unit(z)
    f = as_sequence(f, check_first=False)
    powers = np.exp(1j * np.angle(z) * np.arange(f.shape[0]))
    return powers[:, None] * f


def semigroup_orbit(fam: EvolutionFamily, f) -> np.ndarray:
    """Stack of T(k) f for k = 0..N, built by repeated application of T(1)."""
    fam = _as_family(fam)
    f = as_sequence(f, fam.dim)
    N = f.shape[0] - 1
    steps = fam.steps(np.arange(N))
    orbit = np.zeros((N + 1,) + f.shape, dtype=complex)
    orbit[0] = f
    for k in range(1, N + 1):
        # (T(1) h)(n) = A_{n-1} h_{n-1}
        orbit[k, 1:] = np.einsum("nij,nj->ni", steps, orbit[k - 1, :-1])
    return orbit


def truncated_semigroup_resolvent(fam: EvolutionFamily, z, f, orbit=None) -> np.ndarray:
    """sum_{k=0}^{N} T(k) f / z^{k+1}; exact on the truncation since T(k) f = 0 there for k > N."""
    z = complex(z)
    if abs(z) < 1 - 1e-12:
        raise InvalidParameter("resolvent sum needs |z| >= 1")
    if orbit is None:
        orbit = semigroup_orbit(fam, f)
    weights = z ** -(np.arange(orbit.shape[0]) + 1.0)
    return np.tensordot(weights, orbit, axes=1)


def rotation_identity_check(fam: EvolutionFamily, z, f, orbit=None) -> float:
    """max_n |[R f](n) - z^{-(n+1)} (U*g)(n)| with g_j = z^j f_j."""
    fam = _as_family(fam)
    z = _unit(z)
    lhs = truncated_semigroup_resolvent(fam, z, f, orbit=orbit)
    g = rotate_sequence(f, z)
    n = np.arange(lhs.shape[0])
    rhs = np.exp(-1j * np.angle(z) * (n + 1))[:, None] * apply_convolution(fam, g)
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


def _resolvent_matrix(K: np.ndarray, z: complex, N: int, d: int) -> np.ndarray:
    # block (n, j) = U(n, j) z^{-(n - j + 1)}
    idx = np.repeat(np.arange(1, N + 1), d)
    lag = idx[:, None] - idx[None, :]
    weights = np.where(lag >= 0, z ** -(np.maximum(lag, 0) + 1.0), 0)
    return K * weights


def resolvent_norm_estimate(fam: EvolutionFamily, space: SpaceSpec, z, N: int, seed: int = 0, restarts: int = 1):
    """Lower estimate of the norm of the truncated R(z, T(1)) on ``space``."""
    fam = _as_family(fam)
    z = complex(z)
    d, p, s = fam.dim, space.exponent, fam.state_norm
    if N * d <= DENSE_WORKING_LIMIT:
        R = _resolvent_matrix(dense_oracle_matrix(fam, N), z, N, d)
        if p == 2 and s == 2:
            return float(np.linalg.norm(R, 2))
        if d == 1 and math.isinf(p):
            return float(np.abs(R).sum(axis=1).max())
        if d == 1 and p == 1:
            return float(np.abs(R).sum(axis=0).max())
        RH = R.conj().T
        apply = lambda x: (R @ x.ravel()).reshape(N, d)
        adjoint = lambda y: (RH @ y.ravel()).reshape(N, d)
    else:

        def apply(x):
            out = _forward(fam, np.vstack([np.zeros((1, d), dtype=complex), x]), z)[1:]
            return out / z

        def adjoint(y):
            out = _backward(fam, np.vstack([np.zeros((1, d), dtype=complex), y]), z)[1:]
            return out / np.conj(z)

    starts = [np.ones((N, d), dtype=complex)]
    for i in range(d):
        imp = np.zeros((N, d), dtype=complex)
        imp[0, i] = 1
        starts.append(imp)
    starts += [random_unit(space, d, N, seed + r, s)[1:] for r in range(restarts)]
    return max(_boyd(apply, adjoint, x0, p, s, maxiter=200)[0] for x0 in starts)


@dataclass
class CircleBound:
    estimates: dict = field(default_factory=dict)
    max_estimate: float = 0.0
    c_upper: float = math.inf
    verdict: bool = True


def resolvent_circle_bound(
    fam: EvolutionFamily,
    space: SpaceSpec,
    grid=None,
    N: int = 64,
    seed: int = 0,
    c_upper: float | None = None,
    radii=RADIAL_POINTS,
    tol: float = 1e-9,
) -> CircleBound:
    """Check ||R(z, T(1))|| <= c_U(X) on a unimodular grid and at radial points |z| > 1."""
    fam = _as_family(fam)
    if grid is None:
        grid = unimodular_grid()
    if c_upper is None:
        c_upper = conv_norm_bracket(fam, space, seed=seed).upper
    points = list(grid) + [complex(r) for r in radii]
    est = {complex(z): resolvent_norm_estimate(fam, space, z, N, seed) for z in points}
    mx = max(est.values())
    return CircleBound(estimates=est, max_estimate=mx, c_upper=c_upper, verdict=bool(mx <= c_upper + tol))


@dataclass
class DiskCheck:
    """r(T(1)) <= 1 - 1/c, evaluated on brackets of both sides.

    ``margin`` = (1 - 1/c_lower) - r_upper; ``slack`` is the part of a negative
    margin attributable to bracket widths. ``status`` is "confirmed",
    "within-slack" or "violation".
    """

    r_lower: float
    r_upper: float
    c_lower: float
    c_upper: float
    margin: float
    slack: float
    status: str
    equality_gap: float | None = None


def disk_bound_check(fam: EvolutionFamily, space: SpaceSpec, bracket=None, radius=None, tol=1e-12) -> DiskCheck:
    fam = _as_family(fam)
    bracket = bracket or conv_norm_bracket(fam, space)
    radius = radius or semigroup_spectral_radius(fam)
    r_lo, r_hi = radius.lower, radius.upper
    c_lo, c_hi = bracket.lower, bracket.upper
    exact = bracket.upper_provenance == "scalar-exact" and fam.is_autonomous_scalar and r_lo == r_hi
    if exact:
        # c_upper is the norm itself here, so both sides are known exactly
        c_lo = c_hi
    margin = (1 - 1 / c_lo) - r_hi
    slack = (1 / c_lo - 1 / c_hi) + (r_hi - r_lo)
    if margin >= -tol:
        status = "confirmed"
    elif margin >= -slack - tol:
        status = "within-slack"
    else:
        raise TheoremViolation(
            f"r(T(1)) >= {r_lo!r} exceeds 1 - 1/c <= {1 - 1 / c_hi!r} even at the favorable corner"
        )
    gap = abs(r_hi - (1 - 1 / c_hi)) if exact else None
    return DiskCheck(r_lo, r_hi, bracket.lower, c_hi, margin, slack, status, gap)


def elementary_margins(r) -> np.ndarray:
    """1/(1 - r) + 1/ln r, evaluated without cancellation near r = 1."""
    r = np.asarray(r, dtype=float)
    e = 1.0 - r
    lnr = np.log1p(-e)
    # ln r + (1 - r) = -(e^2/2 + e^3/3 + ...), computed by series for small e
    num = np.where(e < 1e-3, -(e**2) * (0.5 + e / 3 + e**2 / 4 + e**3 / 5 + e**4 / 6), lnr + e)
    return num / (e * lnr)


def elementary_inequality_check(grid=None, count: int = 10_000, eps: float = 1e-8) -> float:
    """Minimum over the grid of 1/(1 - r) + 1/ln r (nonnegative on (0, 1))."""
    if grid is None:
        grid = np.linspace(eps, 1 - eps, count)
    grid = np.asarray(grid, dtype=float)
    if np.any((grid <= 0) | (grid >= 1)):
        raise InvalidParameter("grid must lie in (0, 1)")
    return float(np.min(elementary_margins(grid)))
