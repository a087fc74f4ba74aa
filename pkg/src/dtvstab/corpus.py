"""Named families used for cross-checks and demonstrations."""

from __future__ import annotations

import numpy as np

from .family import GeneratorSpec

SCALAR_GAMMAS = (0.1, 0.25, 0.5, 0.75, 0.9, 0.99, -0.5, -0.8, 0.6j, 0.3 + 0.4j, 0.7 * np.exp(1j))


def _random_stable(d: int, seed: int, radius: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    r = np.max(np.abs(np.linalg.eigvals(A)))
    return A * (radius / r)


def stable_corpus() -> dict:
    """At least fifty uniformly exponentially stable families, keyed by name."""
    fams = {}
    for g in SCALAR_GAMMAS:
        fams[f"scalar:{g:.4g}"] = GeneratorSpec.scalar(g)
    for pair in [(2.0, 0.125), (1.5, 0.25), (0.5, 0.5), (3.0, 0.1), (-1.2, 0.5), (0.9, 0.0)]:
        fams[f"scalar-periodic:{pair}"] = GeneratorSpec.periodic([[[pair[0]]], [[pair[1]]]])
    fams["scalar-periodic:3"] = GeneratorSpec.periodic([[[1.5]], [[0.2]], [[-0.9]]])
    for lam, b in [(0.5, 1.0), (0.3, 2.0), (0.8, 0.5), (-0.6, 1.0), (0.5j, 1.0), (0.0, 1.0)]:
        fams[f"jordan:{lam},{b}"] = GeneratorSpec.constant([[lam, b], [0, lam]])
    fams["diag:0.5,0.2"] = GeneratorSpec.constant(np.diag([0.5, 0.2]))
    fams["rotation:0.7"] = GeneratorSpec.constant(0.7 * np.array([[np.cos(1.0), -np.sin(1.0)], [np.sin(1.0), np.cos(1.0)]]))
    for seed in range(10):
        fams[f"random3:{seed}"] = GeneratorSpec.constant(_random_stable(3, seed, 0.4 + 0.05 * seed))
    fams["nilpotent:2"] = GeneratorSpec.constant([[0, 1], [0, 0]])
    fams["nilpotent:3"] = GeneratorSpec.constant(np.diag([1.0, 2.0], k=1))
    fams["zero:1"] = GeneratorSpec.scalar(0.0)
    fams["zero:2"] = GeneratorSpec.constant(np.zeros((2, 2)))
    fams["prefix-scalar:5,0.5"] = GeneratorSpec.constant([[0.5]], prefix=[[[5.0]], [[3.0]]])
    fams["prefix-scalar:0,0.8"] = GeneratorSpec.constant([[0.8]], prefix=[[[0.0]]])
    fams["prefix-periodic"] = GeneratorSpec.periodic([[[2.0]], [[0.125]]], prefix=[[[1.0]], [[-4.0]], [[0.5j]]])
    fams["prefix-jordan"] = GeneratorSpec.constant([[0.5, 1.0], [0, 0.5]], prefix=[np.eye(2) * 2, [[0, 3], [1, 0]]])
    fams["periodic-scalar-prefix-zero"] = GeneratorSpec.periodic([[[0.9]], [[-0.9j]], [[0.5]]], prefix=[[[0.0]]])
    fams["upper-triangular:3"] = GeneratorSpec.constant([[0.4, 1, 0], [0, 0.6, 1], [0, 0, 0.2]])
    fams["periodic-2x2"] = GeneratorSpec.periodic([[[0, 2], [0.5, 0]], [[0.3, 0], [0.2, 0.3]]])
    for seed in range(4):
        mats = [_random_stable(2, 100 + 3 * seed + k, 0.9) for k in range(2)]
        P = mats[1] @ mats[0]
        r = np.max(np.abs(np.linalg.eigvals(P)))
        if r >= 0.9:
            mats[1] = mats[1] * (0.8 / r)
        fams[f"random-periodic2:{seed}"] = GeneratorSpec.periodic(mats)
    return fams


def unstable_corpus() -> dict:
    return {
        "scalar:2": GeneratorSpec.scalar(2.0),
        "scalar:1": GeneratorSpec.scalar(1.0),
        "radius1.5": GeneratorSpec.constant([[1.5, 1.0], [0.0, 0.5]]),
        "periodic-unstable": GeneratorSpec.periodic([[[4.0]], [[0.5]]]),
        # each step has spectral radius 1/2, the monodromy does not
        "jordan-swap": GeneratorSpec.periodic([[[0.5, 1], [0, 0.5]], [[0.5, 0], [1, 0.5]]]),
        "stable-prefix-unstable-tail": GeneratorSpec.constant([[1.1]], prefix=[[[0.1]]] * 3),
    }


def scalar_constant_corpus() -> dict:
    return {k: v for k, v in stable_corpus().items() if k.startswith("scalar:") or k == "zero:1"}
