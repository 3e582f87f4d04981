"""
Stochastic-trajectory verification of rotating-frame steady states.

Samples the quantum Langevin equations as a classical SDE whose noise
reproduces the symmetrized quadrature correlations set by the effective bath
parameters (N, M).  This is exact for Gaussian dynamics at the level of
second moments, which is all this oracle checks: the ensemble covariance at
late times must agree with the Lyapunov steady state within standard errors.

RNG: numpy Philox (philox4x64), one substream per trajectory batch derived
from (seed, batch-index) via SeedSequence; batch sums are combined in fixed
order, so results are independent of execution order and bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .gaussian import (
    DerivedBath,
    SystemParams,
    build_drift_rotating,
    diffusion_blocks,
)

__all__ = [
    "UnphysicalBath",
    "NoiseModel",
    "EnsembleEstimate",
    "generate_noise",
    "run_ensemble",
    "RNG_NAME",
]

RNG_NAME = "philox4x64"

BATCH_SIZE = 8192


class UnphysicalBath(Exception):
    """Bath correlations violate |M| <= sqrt(N(N+1)): no Gaussian sampler exists."""


@dataclass(frozen=True)
class NoiseModel:
    """Per-mode bath parameters and discretization for the noise sampler."""

    bath1: DerivedBath
    bath2: DerivedBath
    gamma1: float
    gamma2: float
    dt: float
    seed: int = 0


def _step_covariance(model: NoiseModel) -> NDArray[np.float64]:
    """Target covariance of one noise increment: D * dt."""
    return (
        diffusion_blocks((model.gamma1, model.gamma2), (model.bath1, model.bath2))
        * model.dt
    )


def _check_physical(model: NoiseModel) -> None:
    for k, bath in enumerate((model.bath1, model.bath2), start=1):
        if not bath.physical(tol=1e-12):
            raise UnphysicalBath(
                f"bath {k}: |M| = {abs(bath.M):g} exceeds sqrt(N(N+1)) = "
                f"{math.sqrt(bath.N * (bath.N + 1.0)):g}"
            )


def _noise_factor(model: NoiseModel) -> NDArray[np.float64]:
    """Factor L with L L^T = D*dt via eigendecomposition.

    Eigenvalues are clipped at zero; semidefinite edge cases (pure squeezed
    vacuum, |M| = sqrt(N(N+1))) keep the eigenvectors of the degenerate
    quadrature, which plays the role of a pivoting rule.  Raises
    UnphysicalBath when an eigenvalue is negative beyond 1e-12 of scale.
    """
    _check_physical(model)
    cov = _step_covariance(model)
    w, u = np.linalg.eigh(cov)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    if float(w[0]) < -1e-12 * scale:
        raise UnphysicalBath(
            f"per-step noise covariance has negative eigenvalue {w[0]:g}; "
            "check |M| <= sqrt(N(N+1))"
        )
    return u * np.sqrt(np.clip(w, 0.0, None))


def generate_noise(
    model: NoiseModel, n: int, rng: np.random.Generator | None = None
) -> NDArray[np.float64]:
    """Draw n zero-mean Gaussian quadrature increments with covariance D*dt."""
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(model.seed)))
    return rng.standard_normal((n, 4)) @ _noise_factor(model).T


@dataclass(frozen=True)
class EnsembleEstimate:
    """Sample covariance, elementwise standard errors and trajectory count."""

    V_hat: NDArray[np.float64]
    stderr: NDArray[np.float64]
    n_traj: int


def max_rate(sys: SystemParams) -> float:
    """Fastest rotating-frame rate: decay, coupling or detuning."""
    delta = abs(sys.omega1 - sys.omega2)
    return max(sys.gamma1, sys.gamma2, sys.J, delta, 0.01)


def dt_floor(sys: SystemParams) -> float:
    """Hard resolution floor 0.01 over the fastest rate."""
    return 0.01 / max_rate(sys)


def default_dt(sys: SystemParams) -> float:
    """Default step 0.0015 over the fastest rate.

    Keeps the Euler-Maruyama covariance bias near half a standard error at
    n_traj = 1e5 (bias scales linearly in dt; see the dt-halving test).
    """
    return 0.0015 / max_rate(sys)


def default_t_end(sys: SystemParams) -> float:
    """Integration horizon with relaxation margin 12/min(gamma)."""
    return 12.0 / min(sys.gamma1, sys.gamma2)


def run_ensemble(
    sys: SystemParams,
    model: NoiseModel,
    n_traj: int,
    t_end: float | None = None,
) -> EnsembleEstimate:
    """Euler-Maruyama ensemble estimate of the steady-state covariance.

    Trajectories start from vacuum samples, evolve to t_end (default
    12/min(gamma); must be >= 10/min(gamma)) and are pooled into a sample
    covariance.  Standard errors use the Gaussian formula
    Var(V_ij) = (V_ii V_jj + V_ij^2) / n.
    """
    gamma_min = min(sys.gamma1, sys.gamma2)
    if t_end is None:
        t_end = default_t_end(sys)
    if t_end < 10.0 / gamma_min:
        raise ValueError(f"t_end = {t_end:g} below relaxation margin {10.0 / gamma_min:g}")
    if model.dt > dt_floor(sys) * (1.0 + 1e-12):
        raise ValueError(f"dt = {model.dt:g} exceeds resolution floor {dt_floor(sys):g}")

    a = build_drift_rotating(sys)
    noise_t = _noise_factor(model).T
    n_steps = max(1, round(t_end / model.dt))
    dt = t_end / n_steps
    prop_t = (np.eye(4) + dt * a).T

    root = np.random.SeedSequence(model.seed)
    n_batches = (n_traj + BATCH_SIZE - 1) // BATCH_SIZE
    children = root.spawn(n_batches)

    sums = []
    outers = []
    done = 0
    for child in children:
        m = min(BATCH_SIZE, n_traj - done)
        done += m
        rng = np.random.Generator(np.random.Philox(child))
        x = rng.standard_normal((m, 4)) * math.sqrt(0.5)  # vacuum start
        for _ in range(n_steps):
            x = x @ prop_t + rng.standard_normal((m, 4)) @ noise_t
        sums.append(x.sum(axis=0))
        outers.append(x.T @ x)
    s1 = np.sum(sums, axis=0)
    s2 = np.sum(outers, axis=0)

    mean = s1 / n_traj
    v_hat = (s2 - n_traj * np.outer(mean, mean)) / (n_traj - 1)
    v_hat = 0.5 * (v_hat + v_hat.T)
    var = (np.outer(np.diag(v_hat), np.diag(v_hat)) + v_hat**2) / n_traj
    return EnsembleEstimate(V_hat=v_hat, stderr=np.sqrt(var), n_traj=n_traj)
