"""
Laboratory-frame (Floquet) steady states.

When the squeezing phase is fixed relative to the laboratory quadratures
rather than phase-locked to the oscillator, the anomalous bath correlations
oscillate at 2*omega and the covariance dynamics become time-periodic with
period pi/omega.  The asymptotic state is a periodic (Floquet) Gaussian
steady state, computed here by fixed-step integration of

    dV/dt = A(t) V + V A(t)^T + D(t).

Two mathematically equivalent representations are provided:

* ROTATING_M: co-rotating frame, constant drift, D(t) built from
  M_k(t) = M_k * exp(+i 2 omega t);
* LAB: laboratory quadratures, drift includes the omega rotation generator,
  D constant with the lab-frame (N, M).

They differ by a local phase-space rotation, so all entanglement statistics
agree; the agreement doubles as the module's consistency oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm, solve_discrete_lyapunov

from .gaussian import (
    BathSpec,
    CovarianceMatrix,
    DerivedBath,
    SystemParams,
    build_drift_rotating,
    derive_bath_params,
    diffusion_blocks,
    log_negativity,
)

__all__ = [
    "Frame",
    "LabFrameProblem",
    "PeriodicSteadyState",
    "StepTooLarge",
    "NoConvergence",
    "build_time_dependent_generators",
    "propagate_covariance",
    "find_periodic_steady_state",
    "periodic_steady_state_via_map",
    "tc_labframe",
]


class StepTooLarge(Exception):
    """Integration step exceeds the resolution floor T_p/200."""


class NoConvergence(Exception):
    """Stroboscopic relaxation did not contract below tolerance."""


class Frame(enum.Enum):
    """Representation of the lab-fixed squeezing problem."""

    ROTATING_M = "rotating_m"
    LAB = "lab"


@dataclass(frozen=True)
class LabFrameProblem:
    """Resonant two-oscillator system with lab-frame-fixed squeezing phases."""

    sys: SystemParams
    bath1: BathSpec
    bath2: BathSpec
    frame: Frame = Frame.ROTATING_M

    def __post_init__(self):
        if self.sys.omega1 != self.sys.omega2:
            raise ValueError(
                "lab-frame problem requires omega1 == omega2 "
                f"(got {self.sys.omega1} and {self.sys.omega2}); the "
                "nonresonant case is quasi-periodic and unsupported"
            )

    @property
    def omega(self) -> float:
        return self.sys.omega1

    @property
    def period(self) -> float:
        """Period of the covariance dynamics: the anomalous terms run at 2*omega."""
        return math.pi / self.omega


def _rotation_generator(omega: float) -> NDArray[np.float64]:
    """Free-oscillation generator per mode: x' = +omega p, p' = -omega x."""
    block = omega * np.array([[0.0, 1.0], [-1.0, 0.0]])
    g = np.zeros((4, 4))
    g[:2, :2] = block
    g[2:, 2:] = block
    return g


def build_time_dependent_generators(
    p: LabFrameProblem, t: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Drift and diffusion matrices (A(t), D(t)) at time t.

    ROTATING_M: A constant (rotating-frame drift), D(t) from
    M_k(t) = M_k exp(+i 2 omega t).  LAB: A includes the omega rotation
    generator and D is constant.
    """
    b1 = derive_bath_params(p.bath1)
    b2 = derive_bath_params(p.bath2)
    gammas = (p.sys.gamma1, p.sys.gamma2)
    if p.frame is Frame.LAB:
        a = build_drift_rotating(p.sys) + _rotation_generator(p.omega)
        return a, diffusion_blocks(gammas, (b1, b2))
    phase = np.exp(2j * p.omega * t)
    baths_t = (
        DerivedBath(b1.N, b1.M * phase),
        DerivedBath(b2.N, b2.M * phase),
    )
    return build_drift_rotating(p.sys), diffusion_blocks(gammas, baths_t)


def _rk4_step(p: LabFrameProblem, v: NDArray, t: float, dt: float) -> NDArray:
    def rhs(tt: float, vv: NDArray) -> NDArray:
        a, d = build_time_dependent_generators(p, tt)
        return a @ vv + vv @ a.T + d

    k1 = rhs(t, v)
    k2 = rhs(t + dt / 2.0, v + dt / 2.0 * k1)
    k3 = rhs(t + dt / 2.0, v + dt / 2.0 * k2)
    k4 = rhs(t + dt, v + dt * k3)
    out = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (out + out.T)


def _check_dt(p: LabFrameProblem, dt: float) -> None:
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if dt > p.period / 200.0 * (1.0 + 1e-12):
        raise StepTooLarge(
            f"dt = {dt:g} exceeds the resolution floor T_p/200 = {p.period / 200.0:g}"
        )


def propagate_covariance(
    p: LabFrameProblem, v0, t0: float, t1: float, dt: float
) -> CovarianceMatrix:
    """Integrate the covariance ODE from t0 to t1 with fixed-step RK4."""
    _check_dt(p, dt)
    v = v0.entries.copy() if isinstance(v0, CovarianceMatrix) else np.array(v0, float)
    n = max(1, round((t1 - t0) / dt))
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        v = _rk4_step(p, v, t, h)
        t += h
    return CovarianceMatrix(v)


@dataclass(frozen=True)
class PeriodicSteadyState:
    """One period of the converged periodic covariance, with E_N statistics."""

    samples: list[tuple[float, CovarianceMatrix]]
    E_N_mean: float
    E_N_min: float
    E_N_max: float
    residual: float
    periods_used: int

    def stat(self, criterion: str) -> float:
        """Scalar E_N summary: 'mean' (default elsewhere), 'min' or 'max'."""
        return {"mean": self.E_N_mean, "min": self.E_N_min, "max": self.E_N_max}[
            criterion
        ]


def find_periodic_steady_state(
    p: LabFrameProblem,
    dt: float | None = None,
    eps_ps: float = 1e-9,
    max_periods: int = 10_000,
    n_samples: int = 64,
    v0: CovarianceMatrix | None = None,
) -> PeriodicSteadyState:
    """Relax from the vacuum to the periodic steady state.

    Integrates period by period until the stroboscopic residual
    max|V(t + T_p) - V(t)| drops below eps_ps, then samples n_samples phases
    over one final period and evaluates E_N at each.
    """
    t_p = p.period
    if dt is None:
        dt = t_p / 512.0
    _check_dt(p, dt)
    steps = max(200, round(t_p / dt))
    h = t_p / steps

    v = (v0.entries if v0 is not None else 0.5 * np.eye(4)).copy()
    residual = math.inf
    for period in range(1, max_periods + 1):
        v_prev = v
        t = 0.0  # generators are T_p-periodic; phase matters, not absolute time
        for _ in range(steps):
            v = _rk4_step(p, v, t, h)
            t += h
        residual = float(np.max(np.abs(v - v_prev)))
        if residual <= eps_ps:
            break
    else:
        raise NoConvergence(
            f"stroboscopic residual {residual:g} > {eps_ps:g} after {max_periods} periods"
        )

    if steps % n_samples != 0:
        n_samples = math.gcd(steps, n_samples)
    stride = steps // n_samples
    samples: list[tuple[float, CovarianceMatrix]] = []
    e_n: list[float] = []
    t = 0.0
    for i in range(steps):
        if i % stride == 0:
            cm = CovarianceMatrix(v)
            samples.append((t, cm))
            e_n.append(log_negativity(cm).E_N)
        v = _rk4_step(p, v, t, h)
        t += h
    return PeriodicSteadyState(
        samples=samples,
        E_N_mean=float(np.mean(e_n)),
        E_N_min=float(np.min(e_n)),
        E_N_max=float(np.max(e_n)),
        residual=residual,
        periods_used=period,
    )


def one_period_map(
    p: LabFrameProblem, dt: float | None = None
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Fundamental solution over one period: V(T_p) = Phi V(0) Phi^T + Q."""
    t_p = p.period
    if dt is None:
        dt = t_p / 512.0
    _check_dt(p, dt)
    steps = max(200, round(t_p / dt))
    h = t_p / steps

    phi = np.eye(4)
    q = np.zeros((4, 4))

    def rhs(tt: float, y: NDArray, z: NDArray) -> tuple[NDArray, NDArray]:
        a, d = build_time_dependent_generators(p, tt)
        return a @ y, a @ z + z @ a.T + d

    t = 0.0
    for _ in range(steps):
        k1y, k1q = rhs(t, phi, q)
        k2y, k2q = rhs(t + h / 2, phi + h / 2 * k1y, q + h / 2 * k1q)
        k3y, k3q = rhs(t + h / 2, phi + h / 2 * k2y, q + h / 2 * k2q)
        k4y, k4q = rhs(t + h, phi + h * k3y, q + h * k3q)
        phi = phi + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        q = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        q = 0.5 * (q + q.T)
        t += h
    return phi, q


def periodic_steady_state_via_map(
    p: LabFrameProblem, dt: float | None = None
) -> CovarianceMatrix:
    """Stroboscopic fixed point V* = Phi V* Phi^T + Q solved directly.

    Convergence accelerator; agrees with the relaxation route to 1e-9.
    """
    phi, q = one_period_map(p, dt)
    v = solve_discrete_lyapunov(phi, q)
    return CovarianceMatrix(0.5 * (v + v.T))


def tc_labframe(
    omega: float,
    gamma: float,
    J: float,
    r: float,
    phi1: float = 0.0,
    phi2: float = 0.0,
    criterion: str = "mean",
    tol: float = 1e-4,
    dt: float | None = None,
    t_max: float = 10.0,
) -> float | None:
    """Critical temperature of the lab-frame periodic steady state.

    Entangled iff the chosen E_N statistic ('mean', 'min' or 'max') over one
    period is positive.  Bisection in T to absolute tolerance tol; returns
    None when the criterion already fails at T = 0.
    """
    from .analytic import nbar_from_temperature

    def stat(T: float) -> float:
        nbar = nbar_from_temperature(omega, T)
        prob = LabFrameProblem(
            sys=SystemParams(omega, omega, J, gamma, gamma),
            bath1=BathSpec(nbar, r, phi1),
            bath2=BathSpec(nbar, r, phi2),
        )
        return find_periodic_steady_state(prob, dt=dt).stat(criterion)

    if stat(0.0) <= 0.0:
        return None
    t_lo, t_hi = 0.0, 0.05
    while stat(t_hi) > 0.0:
        t_lo, t_hi = t_hi, 2.0 * t_hi
        if t_hi > t_max:
            raise NoConvergence(f"entanglement persists beyond T = {t_max:g}")
    # bracketing samples confirm monotone loss of entanglement with T
    while t_hi - t_lo > tol:
        t_mid = 0.5 * (t_lo + t_hi)
        if stat(t_mid) > 0.0:
            t_lo = t_mid
        else:
            t_hi = t_mid
    return 0.5 * (t_lo + t_hi)


def constant_generator_solution(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    v0: NDArray[np.float64],
    t: float,
) -> NDArray[np.float64]:
    """Closed-form V(t) = e^{At}(V0 - V_ss)e^{A^T t} + V_ss for constant (A, D).

    Oracle for the time-independent (r = 0) limit of the propagator.
    """
    from .gaussian import solve_lyapunov

    v_ss = solve_lyapunov(a, d).entries
    e = expm(a * t)
    return e @ (v0 - v_ss) @ e.T + v_ss
