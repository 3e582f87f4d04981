"""
Gaussian steady states of two coupled oscillators with local squeezed baths.

Builds the quadrature drift and diffusion matrices in the phase-locked
(rotating) frame, solves the steady-state Lyapunov equation, and extracts
symplectic spectra and logarithmic negativity.

Conventions: hbar = 1, x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
so the vacuum variance is 1/2 per quadrature and the entanglement threshold
sits at smallest partially-transposed symplectic eigenvalue 1/2.
Quadrature ordering is (x1, p1, x2, p2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_continuous_lyapunov

__all__ = [
    "SystemParams",
    "BathSpec",
    "DerivedBath",
    "CovarianceMatrix",
    "EntanglementResult",
    "NotStable",
    "NotPositiveDefinite",
    "OMEGA",
    "derive_bath_params",
    "build_drift_rotating",
    "build_diffusion_rotating",
    "diffusion_blocks",
    "solve_lyapunov",
    "steady_state",
    "partial_transpose",
    "symplectic_eigenvalues",
    "log_negativity",
]

TWO_PI = 2.0 * math.pi

#: Symplectic form for two modes in (x1, p1, x2, p2) ordering.
OMEGA: NDArray[np.float64] = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


class NotStable(Exception):
    """Drift matrix is not Hurwitz: no steady state exists."""


class NotPositiveDefinite(Exception):
    """Covariance matrix is not positive definite."""


@dataclass(frozen=True)
class SystemParams:
    """Oscillator frequencies, intermode coupling and decay rates (units of omega)."""

    omega1: float = 1.0
    omega2: float = 1.0
    J: float = 0.0
    gamma1: float = 0.5
    gamma2: float = 0.5

    def __post_init__(self):
        if not self.gamma1 > 0.0:
            raise ValueError(f"gamma1 must be > 0, got {self.gamma1}")
        if not self.gamma2 > 0.0:
            raise ValueError(f"gamma2 must be > 0, got {self.gamma2}")
        if not self.omega1 > 0.0:
            raise ValueError(f"omega1 must be > 0, got {self.omega1}")
        if not self.omega2 > 0.0:
            raise ValueError(f"omega2 must be > 0, got {self.omega2}")
        if self.J < 0.0:
            raise ValueError(f"J must be >= 0, got {self.J}")


@dataclass(frozen=True)
class BathSpec:
    """Squeezed thermal reservoir: occupation nbar, squeezing r, phase phi."""

    nbar: float = 0.0
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.nbar < 0.0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.r < 0.0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        # store phase in [0, 2*pi)
        object.__setattr__(self, "phi", self.phi % TWO_PI)


@dataclass(frozen=True)
class DerivedBath:
    """Effective bath population N and anomalous two-photon correlation M."""

    N: float
    M: complex

    def physical(self, tol: float = 1e-12) -> bool:
        """Whether |M| <= sqrt(N(N+1)) up to tol (squeezed thermal physicality)."""
        return abs(self.M) <= math.sqrt(self.N * (self.N + 1.0)) + tol


def derive_bath_params(spec: BathSpec) -> DerivedBath:
    """Map (nbar, r, phi) to the effective bath parameters (N, M).

    N = nbar*cosh(2r) + sinh^2(r),
    M = -(1/2)*(2*nbar + 1)*sinh(2r)*exp(i*2*phi).
    """
    n = spec.nbar * math.cosh(2.0 * spec.r) + math.sinh(spec.r) ** 2
    m = -0.5 * (2.0 * spec.nbar + 1.0) * math.sinh(2.0 * spec.r) * np.exp(2j * spec.phi)
    return DerivedBath(N=n, M=complex(m))


def build_drift_rotating(sys: SystemParams) -> NDArray[np.float64]:
    """Quadrature drift matrix A in the frame co-rotating at omega1.

    d<X>/dt = A <X> with X = (x1, p1, x2, p2).  The beam-splitter coupling J
    contributes (x1' = +J p2, p1' = -J x2) and symmetrically on mode 2; a
    detuning delta = omega1 - omega2 leaves a residual rotation generator on
    mode 2 (x2' += -delta*p2, p2' += +delta*x2).
    """
    g1, g2, J = sys.gamma1, sys.gamma2, sys.J
    delta = sys.omega1 - sys.omega2
    return np.array(
        [
            [-g1 / 2.0, 0.0, 0.0, J],
            [0.0, -g1 / 2.0, -J, 0.0],
            [0.0, J, -g2 / 2.0, -delta],
            [-J, 0.0, delta, -g2 / 2.0],
        ]
    )


def diffusion_blocks(
    gammas: tuple[float, float],
    baths: tuple[DerivedBath, DerivedBath],
) -> NDArray[np.float64]:
    """Block-diagonal diffusion matrix D = D1 (+) D2 from (N, M) per mode.

    D_k = gamma_k * [[N + 1/2 + Re M, Im M], [Im M, N + 1/2 - Re M]].
    Accepts complex M, so it also serves the lab-frame time-dependent case.
    """
    d = np.zeros((4, 4))
    for k, (g, bath) in enumerate(zip(gammas, baths)):
        re_m, im_m = bath.M.real, bath.M.imag
        half = bath.N + 0.5
        d[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = g * np.array(
            [[half + re_m, im_m], [im_m, half - re_m]]
        )
    return d


def build_diffusion_rotating(
    sys: SystemParams, bath1: DerivedBath, bath2: DerivedBath
) -> NDArray[np.float64]:
    """Diffusion matrix for phase-locked (stationary M) reservoirs."""
    return diffusion_blocks((sys.gamma1, sys.gamma2), (bath1, bath2))


@dataclass(frozen=True)
class CovarianceMatrix:
    """4x4 real symmetric covariance matrix of (x1, p1, x2, p2)."""

    entries: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("covariance matrix is not symmetric to 1e-12")
        object.__setattr__(self, "entries", m)

    @classmethod
    def vacuum(cls) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(4))

    def min_uncertainty_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian matrix V + (i/2) Omega."""
        h = self.entries + 0.5j * OMEGA
        return float(np.linalg.eigvalsh(h)[0])

    def is_physical(self, tol: float = 1e-10) -> bool:
        """Uncertainty-principle check: V + (i/2) Omega >= -tol."""
        return self.min_uncertainty_eigenvalue() >= -tol


@dataclass(frozen=True)
class EntanglementResult:
    """Smallest PT symplectic eigenvalue, logarithmic negativity, and flag."""

    nu_minus: float
    E_N: float
    entangled: bool


def _as_matrix(v) -> NDArray[np.float64]:
    if isinstance(v, CovarianceMatrix):
        return v.entries
    return np.asarray(v, dtype=float)


def solve_lyapunov(a: NDArray[np.float64], d: NDArray[np.float64]) -> CovarianceMatrix:
    """Solve A V + V A^T + D = 0 for the steady-state covariance.

    Raises NotStable unless every eigenvalue of A has real part < -1e-12.
    The residual is checked to 1e-10 in max norm.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    margin = float(np.max(np.linalg.eigvals(a).real))
    if margin >= -1e-12:
        raise NotStable(f"drift matrix is not Hurwitz (max Re eig = {margin:g})")
    v = solve_continuous_lyapunov(a, -d)
    v = 0.5 * (v + v.T)
    residual = np.max(np.abs(a @ v + v @ a.T + d))
    if residual > 1e-10:
        raise RuntimeError(f"Lyapunov residual {residual:g} exceeds 1e-10")
    return CovarianceMatrix(v)


def steady_state(
    sys: SystemParams, bath1: BathSpec, bath2: BathSpec
) -> CovarianceMatrix:
    """Rotating-frame steady state for the given system and reservoirs."""
    a = build_drift_rotating(sys)
    d = build_diffusion_rotating(
        sys, derive_bath_params(bath1), derive_bath_params(bath2)
    )
    return solve_lyapunov(a, d)


def partial_transpose(v) -> NDArray[np.float64]:
    """Momentum reversal on mode 2: V -> P V P with P = diag(1, 1, 1, -1)."""
    p = np.diag([1.0, 1.0, 1.0, -1.0])
    return p @ _as_matrix(v) @ p


def symplectic_eigenvalues(v, method: str = "eig") -> tuple[float, float]:
    """Symplectic eigenvalues (nu1 <= nu2) of a 4x4 symmetric positive matrix.

    method="eig" (authoritative): moduli of the eigenvalue pairs of i*Omega*V.
    method="invariants": two-mode closed form from the symplectic invariants,
    nu^2 = (Delta +/- sqrt(Delta^2 - 4 det V))/2 with
    Delta = det A + det B + 2 det C for the block decomposition
    V = [[A, C], [C^T, B]].  The two paths agree to 1e-10 on physical states.
    """
    m = _as_matrix(v)
    if float(np.linalg.eigvalsh(m)[0]) <= 0.0:
        raise NotPositiveDefinite("covariance matrix has an eigenvalue <= 0")
    if method == "eig":
        ev = np.abs(np.linalg.eigvals(1j * OMEGA @ m))
        ev.sort()
        return float(ev[0]), float(ev[2])
    if method == "invariants":
        a = np.linalg.det(m[:2, :2])
        b = np.linalg.det(m[2:, 2:])
        c = np.linalg.det(m[:2, 2:])
        delta = a + b + 2.0 * c
        disc = max(delta * delta - 4.0 * np.linalg.det(m), 0.0)
        root = math.sqrt(disc)
        nu1 = math.sqrt(max((delta - root) / 2.0, 0.0))
        nu2 = math.sqrt((delta + root) / 2.0)
        return nu1, nu2
    raise ValueError(f"unknown method {method!r}")


def log_negativity(v) -> EntanglementResult:
    """Logarithmic negativity E_N = max{0, -log2(2 nu_minus)} of a two-mode state.

    nu_minus is the smaller symplectic eigenvalue of the partially transposed
    covariance matrix; the state is entangled iff nu_minus < 1/2.
    """
    nu_minus, _ = symplectic_eigenvalues(partial_transpose(v))
    e_n = max(0.0, -math.log2(2.0 * nu_minus))
    return EntanglementResult(nu_minus=nu_minus, E_N=e_n, entangled=nu_minus < 0.5)
