"""Stability certificates: every inequality check assembled into one report."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from .config import Config, family_digest, jsonable
from .convolution import (
    NormBracket,
    conv_norm_bracket,
    conv_norm_lower,
    conv_norm_upper,
    geometric_bound,
    stable_bounds,
    u1_bracket,
)
from .errors import InvalidParameter, NotStableCertified, TheoremViolation
from .family import (
    EvolutionFamily,
    ExponentialBound,
    GeneratorSpec,
    GrowthBound,
    growth_bound_oracle,
    semigroup_spectral_radius,
)
from .linalg import as_matrix
from .resolvent import disk_bound_check, resolvent_circle_bound, unimodular_grid
from .sequences import SpaceSpec

REPORT_SCHEMA_VERSION = 1
CERTIFIED = "CERTIFIED_STABLE"
NOT_CERTIFIED = "NOT_CERTIFIED"
VIOLATION = "THEOREM_VIOLATION"
EXIT_CODES = {CERTIFIED: 0, NOT_CERTIFIED: 2, VIOLATION: 3}

PRODUCT_TOL = 1e-9
EXACT_TOL = 1e-12


def corner_product(w: float, c: float) -> float:
    """w * c with the convention -inf * (positive) = -inf."""
    if w == -math.inf:
        return -math.inf if c > 0 else 0.0
    return w * c


# --- Datko ---------------------------------------------------------------------------------


@dataclass
class DatkoRow:
    j: int
    basis: int
    p: float
    partial_sum: float
    tail_bound: float
    total: float
    bound: float
    ok: bool
    diverged: bool = False
    diverged_at: int | None = None


def datko_check(
    fam: EvolutionFamily,
    p: float,
    j_max: int = 3,
    horizon: int = 200,
    bound: ExponentialBound | None = None,
    c_upper: float | None = None,
    threshold: float = 1e6,
) -> list:
    """sum_{n=j}^{horizon} ||U(n, j) e_i||^p plus a geometric tail bound, for 1 <= j <= j_max.

    ``p = inf`` takes the supremum over n instead. Rows flag divergence once a
    partial sum exceeds ``threshold``.
    """
    rows = []
    d = fam.dim
    s = fam.state_norm
    for j in range(1, j_max + 1):
        for i in range(d):
            v = np.zeros(d, dtype=complex)
            v[i] = 1.0
            acc = 0.0
            diverged_at = None
            for n in range(j, horizon + 1):
                nv = float(np.linalg.norm(v, ord=s))
                acc = max(acc, nv) if math.isinf(p) else acc + nv**p
                if diverged_at is None and acc > threshold:
                    diverged_at = n
                v = fam.step(n) @ v
            if bound is not None and bound.omega < 0:
                if math.isinf(p):
                    tail = bound.M * math.exp(bound.omega * (horizon + 1 - j))
                else:
                    tail = bound.M**p * math.exp(bound.omega * p * (horizon + 1 - j)) / -math.expm1(bound.omega * p)
            else:
                tail = math.inf
            total = max(acc, tail) if math.isinf(p) else acc + tail
            if c_upper is None:
                limit = math.inf
            else:
                limit = c_upper if math.isinf(p) else c_upper**p
            rows.append(
                DatkoRow(
                    j=j, basis=i, p=p, partial_sum=acc, tail_bound=tail, total=total, bound=limit,
                    ok=bool(total <= limit * (1 + PRODUCT_TOL)),
                    diverged=diverged_at is not None, diverged_at=diverged_at,
                )
            )
    return rows


# --- certificate ---------------------------------------------------------------------------


@dataclass
class StabilityCertificate:
    family_digest: str
    space: str
    verdict: str
    omega0: dict
    c_bracket: dict | None = None
    thm12_i_margin: float | None = None
    thm12_ii_margin: float | None = None
    thm12_i: dict | None = None
    thm12_ii: dict | None = None
    resolvent: dict | None = None
    radius_bracket: dict | None = None
    datko: list = field(default_factory=list)
    corollary2: dict | None = None
    seeds_and_tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    schema_version: int = REPORT_SCHEMA_VERSION
    timestamp: str | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self, timestamp=True) -> dict:
        d = asdict(self)
        if not timestamp:
            d.pop("timestamp")
        return jsonable(d)


def _bracket_dict(b: NormBracket) -> dict:
    return {
        "lower": b.lower,
        "upper": b.upper,
        "width": b.width,
        "upper_provenance": b.upper_provenance,
        "lower_method": b.lower_method,
        "N": b.N,
        "converged": b.converged,
        "history": [list(h) for h in b.history],
        "upper_candidates": b.upper_candidates,
        "exponential_bound": None if b.bound is None else {"omega": b.bound.omega, "M": b.bound.M},
    }


def product_check(growth: GrowthBound, bracket: NormBracket, exact: bool) -> dict:
    """omega_0 * c <= -1 on interval data.

    The favorable corner (w_lo * c_upper) can only falsify; the conservative
    corner (w_hi * c_lower) confirms. Exact data is checked directly.
    """
    fav = corner_product(growth.lower, bracket.upper)
    cons = corner_product(growth.upper, bracket.lower)
    out = {
        "product_favorable": fav,
        "product_conservative": cons,
        "margin": -1.0 - cons,
        "confirmed": bool(cons <= -1 + PRODUCT_TOL),
        "violated": bool(fav > -1 + PRODUCT_TOL),
        "exact": exact,
    }
    if exact:
        prod = corner_product(growth.value, bracket.upper)
        out["product_exact"] = prod
        out["exact_ok"] = bool(prod <= -1 + EXACT_TOL)
        out["violated"] = out["violated"] or not out["exact_ok"]
    return out


@dataclass
class Core:
    fam: EvolutionFamily
    growth: GrowthBound
    bracket: NormBracket | None
    bounds: list
    stable: bool
    reason: str = ""


def _core(fam, space, schedule, tol, seed) -> Core:
    growth = growth_bound_oracle(fam)
    if not growth.upper < 0:
        return Core(fam, growth, None, [], False, f"omega_0 bracket upper end {growth.upper:.6g} >= 0")
    try:
        bounds = stable_bounds(fam, growth)
    except NotStableCertified as exc:
        return Core(fam, growth, None, [], False, str(exc))
    best = min(bounds, key=lambda b: geometric_bound(b.M, b.omega))
    upper = conv_norm_upper(fam, space, best)
    bracket = conv_norm_bracket(fam, space, schedule=schedule, seed=seed, tol=tol, upper=upper)
    return Core(fam, growth, bracket, bounds, True)


def certify_family(
    spec: GeneratorSpec,
    space: SpaceSpec,
    schedule="auto",
    tol: float = 1e-6,
    seed: int = 42,
    state_norm: float = 2,
    grid_points: int = 64,
    resolvent_N: int = 64,
    timestamp: bool = True,
) -> StabilityCertificate:
    fam = EvolutionFamily(spec, state_norm=state_norm)
    core = _core(fam, space, schedule, tol, seed)
    growth = core.growth
    radius = semigroup_spectral_radius(fam)
    radius_slack = radius.log_upper - radius.log_lower if radius.log_lower > -math.inf else 0.0
    radius_bracket = {
        "log_r_lower": radius.log_lower,
        "log_r_upper": radius.log_upper,
        "omega0": growth.value,
        "contains": radius.contains_log(growth.value, slack=1e-6),
        "slack": radius_slack,
    }
    cert = StabilityCertificate(
        family_digest=family_digest(spec),
        space=str(space),
        verdict=NOT_CERTIFIED,
        omega0={"value": growth.value, "lower": growth.lower, "upper": growth.upper, "note": growth.note},
        radius_bracket=radius_bracket,
        seeds_and_tolerances={
            "seed": seed,
            "tolerance": tol,
            "schedule": schedule if schedule == "auto" else list(schedule),
            "state_norm": state_norm,
            "product_tolerance": PRODUCT_TOL,
            "exact_tolerance": EXACT_TOL,
            "grid_points": grid_points,
            "resolvent_N": resolvent_N,
        },
        timestamp=datetime.now(timezone.utc).isoformat() if timestamp else None,
    )
    p_datko = space.exponent
    violations = []
    if not radius_bracket["contains"]:
        violations.append("semigroup spectral bracket misses omega_0")

    if not core.stable:
        cert.notes.append(f"not stable-certified: {core.reason}; the convolution operator is unbounded "
                          "exactly when the family is not uniformly exponentially stable")
        rows = datko_check(fam, p_datko)
        cert.datko = [asdict(r) for r in rows]
        if any(r.diverged for r in rows):
            cert.notes.append("Datko sums diverge")
        cert.verdict = VIOLATION if violations else NOT_CERTIFIED
        cert.notes.extend(violations)
        return cert

    bracket = core.bracket
    cert.c_bracket = _bracket_dict(bracket)
    if not bracket.converged:
        cert.notes.append("inconclusive-bracket: width exceeds tolerance after the truncation schedule")
    if space.kind == "linf":
        cert.notes.append("l^inf_0 lower bounds use finitely supported witnesses")
    exact = fam.is_autonomous_scalar and bracket.upper_provenance == "scalar-exact" and growth.width == 0
    t1 = product_check(growth, bracket, exact)
    cert.thm12_i = t1
    cert.thm12_i_margin = t1["margin"]
    if growth.value == -math.inf:
        cert.notes.append("omega_0 = -inf (nilpotent monodromy); the product is -inf by convention")
    if t1["violated"]:
        violations.append("omega_0 * c > -1 at the favorable corner")

    try:
        disk = disk_bound_check(fam, space, bracket=bracket, radius=radius)
        cert.thm12_ii = asdict(disk)
        cert.thm12_ii_margin = disk.margin
    except TheoremViolation as exc:
        violations.append(f"disk bound: {exc}")

    N_res = min(resolvent_N, bracket.N if bracket.N else resolvent_N)
    circle = resolvent_circle_bound(
        fam, space, grid=unimodular_grid(grid_points), N=N_res, seed=seed, c_upper=bracket.upper
    )
    cert.resolvent = {"max_estimate": circle.max_estimate, "c_upper": circle.c_upper, "ok": circle.verdict,
                      "N": N_res, "radii": [1.0, 1.25, 2.0, 10.0]}
    if not circle.verdict:
        violations.append("resolvent estimate exceeds c_upper")

    best = bracket.bound
    rows = datko_check(fam, p_datko, bound=best, c_upper=bracket.upper)
    cert.datko = [asdict(r) for r in rows]
    if not all(r.ok for r in rows):
        violations.append("Datko sums exceed c_upper^p")
    if any(r.diverged for r in rows):
        violations.append("Datko divergence reported for a stable-certified family")

    if fam.spec.is_autonomous:
        try:
            cert.corollary2 = corollary2_report(fam.spec.tail.matrices[0], seed=seed)
            if cert.corollary2["violated"]:
                violations.append("ln r(T) * u1 > -1")
        except NotStableCertified as exc:
            cert.notes.append(f"u1 report skipped: {exc}")

    cert.notes.extend(violations)
    cert.verdict = VIOLATION if violations else CERTIFIED
    return cert


def certify(config: Config, timestamp: bool = True) -> StabilityCertificate:
    return certify_family(
        config.spec, config.space, schedule=config.schedule, tol=config.tolerance, seed=config.seed,
        state_norm=config.state_norm, timestamp=timestamp,
    )


# --- u1 bound for autonomous families -------------------------------------------------------


def corollary2_report(T, p_list=(1, 2, 4), schedule=(16, 32, 64), seed: int = 42, state_norm=2) -> dict:
    """u_1(T) dominates the l^p convolution norm, and ln r(T) * u_1(T) <= -1."""
    T = as_matrix(T)
    fam = EvolutionFamily(GeneratorSpec.constant(T), state_norm=state_norm)
    u1 = u1_bracket(T, p=state_norm)
    growth = growth_bound_oracle(fam)
    if not growth.upper < 0:
        raise NotStableCertified("r(T) >= 1")
    rows = []
    for p in p_list:
        space = SpaceSpec.lp(p)
        lowers = [conv_norm_lower(fam, space, N, seed=seed, restarts=1).value for N in schedule]
        rows.append({"p": p, "lowers": lowers, "ok": bool(max(lowers) <= u1.upper + PRODUCT_TOL)})
    product = corner_product(growth.lower, u1.upper)
    out = {
        "u1_lower": u1.lower,
        "u1_upper": u1.upper,
        "u1_provenance": u1.upper_provenance,
        "log_r_lower": growth.lower,
        "product": product,
        "margin": -1.0 - product,
        "lp_rows": rows,
        "exact": u1.upper_provenance == "scalar-exact" and growth.width == 0,
    }
    out["violated"] = bool(product > -1 + PRODUCT_TOL or not all(r["ok"] for r in rows))
    if out["exact"]:
        out["exact_ok"] = bool(corner_product(growth.value, u1.upper) <= -1 + EXACT_TOL)
        out["violated"] = out["violated"] or not out["exact_ok"]
    return out


# --- sweep ---------------------------------------------------------------------------------

SWEEP_COLUMNS = ("gamma", "omega0", "c_lower", "c_upper", "product_corner", "margin")


def sweep_row(gamma: float, space: SpaceSpec, tol: float = 1e-6, seed: int = 42, schedule="auto") -> dict:
    if not 0 < gamma < 1:
        raise InvalidParameter(f"sweep needs gamma in (0, 1), got {gamma}")
    fam = EvolutionFamily(GeneratorSpec.scalar(gamma))
    core = _core(fam, space, schedule, tol, seed)
    prod = corner_product(core.growth.upper, core.bracket.lower)
    return {
        "gamma": gamma,
        "omega0": core.growth.value,
        "c_lower": core.bracket.lower,
        "c_upper": core.bracket.upper,
        "product_corner": prod,
        "margin": -1.0 - prod,
    }


def sweep(gammas, space: SpaceSpec | None = None, tol: float = 1e-6, seed: int = 42, workers: int | None = None) -> list:
    """One row per gamma, in grid order; rows are computed concurrently."""
    space = space or SpaceSpec("c0")
    gammas = [float(g) for g in gammas]
    for g in gammas:
        if not 0 < g < 1:
            raise InvalidParameter(f"sweep needs gamma in (0, 1), got {g}")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda g: sweep_row(g, space, tol, seed), gammas))


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([repr(float(r[c])) for c in SWEEP_COLUMNS])
    return buf.getvalue()


# --- diagnostics ---------------------------------------------------------------------------


def analyze(config: Config) -> dict:
    fam = EvolutionFamily(config.spec, state_norm=config.state_norm)
    growth = growth_bound_oracle(fam)
    radius = semigroup_spectral_radius(fam)
    est = growth.monodromy_radius
    out = {
        "family_digest": family_digest(config.spec),
        "dimension": fam.dim,
        "prefix_length": fam.L,
        "period": fam.q,
        "monodromy_radius": {"value": est.value, "lower": est.lower, "upper": est.upper},
        "omega0": {"value": growth.value, "lower": growth.lower, "upper": growth.upper},
        "semigroup_radius": {"lower": radius.lower, "upper": radius.upper},
        "radius_consistent": radius.contains_log(growth.value, slack=1e-6),
        "uniformly_exponentially_stable": bool(growth.upper < 0),
    }
    if growth.upper < 0:
        try:
            out["exponential_bounds"] = [
                {"omega": b.omega, "M": b.M, "window": b.window} for b in stable_bounds(fam, growth)
            ]
        except NotStableCertified as exc:
            out["exponential_bounds"] = []
            out["note"] = str(exc)
    return jsonable(out)


def oracle(config: Config, n: int = 64, trials: int = 4, tol: float = 1e-10) -> dict:
    """Cross-check structured convolution against the dense matrix on a length-``n`` truncation."""
    from .convolution import apply_convolution, apply_convolution_adjoint, dense_oracle_matrix

    fam = EvolutionFamily(config.spec, state_norm=config.state_norm)
    d = fam.dim
    K = dense_oracle_matrix(fam, n)
    rng = np.random.default_rng(config.seed)
    apply_dev = adjoint_dev = 0.0
    for _ in range(trials):
        f = np.zeros((n + 1, d), dtype=complex)
        f[1:] = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        scale = max(1.0, float(np.abs(K).max()))
        y = apply_convolution(fam, f)[1:].ravel()
        apply_dev = max(apply_dev, float(np.abs(y - K @ f[1:].ravel()).max()) / scale)
        h = apply_convolution_adjoint(fam, f)[1:].ravel()
        adjoint_dev = max(adjoint_dev, float(np.abs(h - K.conj().T @ f[1:].ravel()).max()) / scale)
    out = {"N": n, "dimension": d, "apply_deviation": apply_dev, "adjoint_deviation": adjoint_dev}
    ok = apply_dev <= tol and adjoint_dev <= tol
    if d == 1:
        # truncated row and column sums by recurrence, compared with induced norms of K
        a = np.abs(fam.steps(np.arange(n))[:, 0, 0])
        R = np.zeros(n + 1)
        for k in range(1, n + 1):
            R[k] = a[k - 1] * R[k - 1] + 1.0
        C = np.zeros(n + 1)
        C[n] = 1.0
        for j in range(n - 1, 0, -1):
            C[j] = 1.0 + a[j] * C[j + 1]
        linf, l1 = float(np.abs(K).sum(axis=1).max()), float(np.abs(K).sum(axis=0).max())
        dev_inf = abs(linf - R[1:].max()) / max(1.0, linf)
        dev_1 = abs(l1 - C[1:].max()) / max(1.0, l1)
        out.update(linf_norm=linf, l1_norm=l1, linf_deviation=dev_inf, l1_deviation=dev_1)
        ok = ok and dev_inf <= 1e-12 and dev_1 <= 1e-12
    out["agree"] = bool(ok)
    return jsonable(out)
