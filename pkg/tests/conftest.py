"""Shared helpers: independent oracles and random instance generators."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from sqsteady.gaussian import OMEGA, BathSpec, SystemParams


def kron_solve(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Brute-force Lyapunov solve via the 16x16 vectorized linear system.

    vec(A V + V A^T) = (I (x) A + A (x) I) vec(V) in column-major stacking.
    Independent oracle for the production solver.
    """
    eye = np.eye(4)
    m = np.kron(eye, a) + np.kron(a, eye)
    v = np.linalg.solve(m, -d.flatten(order="F"))
    return v.reshape((4, 4), order="F")


def random_stable_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random Hurwitz A and symmetric PSD D."""
    g = rng.standard_normal((4, 4))
    shift = float(np.max(np.linalg.eigvals(g).real)) + 0.5 + rng.uniform(0.0, 1.0)
    a = g - shift * np.eye(4)
    b = rng.standard_normal((4, 4))
    return a, b @ b.T


def random_physical_cov(rng: np.random.Generator) -> np.ndarray:
    """Random physical covariance: I/2 + W W^T is always above vacuum noise."""
    w = 0.7 * rng.standard_normal((4, 4))
    return 0.5 * np.eye(4) + w @ w.T


def random_symplectic(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random symplectic matrix S = exp(Omega K) with K symmetric."""
    g = rng.standard_normal((4, 4)) * scale
    k = 0.5 * (g + g.T)
    return expm(OMEGA @ k)


def random_bath(rng: np.random.Generator, r_max: float = 1.0) -> BathSpec:
    return BathSpec(
        nbar=rng.uniform(0.0, 2.0),
        r=rng.uniform(0.0, r_max),
        phi=rng.uniform(0.0, 2.0 * np.pi),
    )


def random_system(rng: np.random.Generator, j_max: float = 2.0) -> SystemParams:
    return SystemParams(
        omega1=1.0,
        omega2=1.0,
        J=rng.uniform(0.0, j_max),
        gamma1=rng.uniform(0.2, 1.5),
        gamma2=rng.uniform(0.2, 1.5),
    )
