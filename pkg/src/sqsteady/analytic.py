"""
Closed-form steady-state expressions in the symmetric resonant limit.

Valid for omega1 = omega2 = omega, gamma1 = gamma2 = gamma, r1 = r2 = r and
aligned squeezing phases phi1 = phi2 = 0 (the alignment under which the
closed forms reproduce the numerical Lyapunov pipeline; verified by test).
Units: k_B = 1, temperatures in units of omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import bisect, minimize_scalar

__all__ = [
    "SymmetricCase",
    "AnalyticIntermediates",
    "intermediates",
    "thermal_y",
    "R_function",
    "nu_minus_analytic",
    "critical_temperature",
    "OptimalSqueezing",
    "optimal_squeezing",
    "entanglement_boundary",
]


@dataclass(frozen=True)
class SymmetricCase:
    """Symmetric resonant parameter set: common omega, gamma, r and temperature T."""

    omega: float = 1.0
    gamma: float = 0.5
    J: float = 0.0
    r: float = 0.0
    T: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.omega > 0.0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.J < 0.0:
            raise ValueError(f"J must be >= 0, got {self.J}")
        if self.r < 0.0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if self.T < 0.0:
            raise ValueError(f"T must be >= 0, got {self.T}")


@dataclass(frozen=True)
class AnalyticIntermediates:
    """K = cosh 2r, S = sinh 2r, chi = 2*gamma*J/(gamma^2+4J^2), mu = gamma^2/(gamma^2+4J^2)."""

    K: float
    S: float
    chi: float
    mu: float


def intermediates(gamma: float, J: float, r: float) -> AnalyticIntermediates:
    """Evaluate the hyperbolic and coupling-ratio intermediates."""
    denom = gamma * gamma + 4.0 * J * J
    return AnalyticIntermediates(
        K=math.cosh(2.0 * r),
        S=math.sinh(2.0 * r),
        chi=2.0 * gamma * J / denom,
        mu=gamma * gamma / denom,
    )


def thermal_y(omega: float, T: float) -> float:
    """y = 2*nbar + 1 = coth(omega / (2 T)); exactly 1 at T = 0."""
    if T == 0.0:
        return 1.0
    x = omega / (2.0 * T)
    if x > 350.0:  # coth saturates; avoid overflow in tanh's argument handling
        return 1.0
    return 1.0 / math.tanh(x)


def nbar_from_temperature(omega: float, T: float) -> float:
    """Mean thermal occupation nbar = (y - 1)/2 at temperature T."""
    return 0.5 * (thermal_y(omega, T) - 1.0)


def R_function(gamma: float, J: float, r: float) -> float:
    """R(r, J) = sqrt(K^2 - mu^2 S^2) - chi*S.

    y * R = 2*nu_minus; R < 1 marks the zero-temperature entangled region.
    """
    q = intermediates(gamma, J, r)
    return math.sqrt(q.K * q.K - q.mu * q.mu * q.S * q.S) - q.chi * q.S


def nu_minus_analytic(case: SymmetricCase) -> float:
    """Smallest PT symplectic eigenvalue nu_minus = (y/2) * R(r, J)."""
    y = thermal_y(case.omega, case.T)
    return 0.5 * y * R_function(case.gamma, case.J, case.r)


def critical_temperature(
    gamma: float, J: float, r: float, omega: float = 1.0
) -> float | None:
    """Temperature at which y(T) * R(r, J) = 1: T_c = omega / (2 arctanh R).

    Returns None when R >= 1 (separable at every temperature, including T=0).
    """
    big_r = R_function(gamma, J, r)
    if big_r >= 1.0 - 1e-14:
        return None
    return omega / math.log((1.0 + big_r) / (1.0 - big_r))


@dataclass(frozen=True)
class OptimalSqueezing:
    """Minimizer of R(r, J) over r, with the value R* and the route used."""

    r_star: float
    R_star: float
    closed_form: bool


def optimal_squeezing(gamma: float, J: float) -> OptimalSqueezing:
    """Squeezing strength minimizing R (maximal entanglement and T_c).

    Stationarity of R gives sinh^2(2 r*) = chi^2 / [(1-mu^2)(1-mu^2-chi^2)].
    Since chi^2 = mu(1-mu), the denominator factor 1-mu^2-chi^2 = 1-mu > 0
    for all J > 0, but a numeric golden-section fallback is kept for safety.
    """
    if not J > 0.0:
        raise ValueError(f"J must be > 0, got {J}")
    q = intermediates(gamma, J, 0.0)
    denom = (1.0 - q.mu * q.mu) * (1.0 - q.mu * q.mu - q.chi * q.chi)
    if denom > 0.0:
        s2 = q.chi * q.chi / denom
        r_star = 0.5 * math.asinh(math.sqrt(s2))
        return OptimalSqueezing(r_star, R_function(gamma, J, r_star), True)
    res = minimize_scalar(
        lambda r: R_function(gamma, J, r),
        bracket=(0.0, 0.5, 5.0),
        method="golden",
        options={"xtol": 1e-12},
    )
    return OptimalSqueezing(float(res.x), float(res.fun), False)


def entanglement_boundary(
    gamma: float, J: float, y: float = 1.0
) -> tuple[float, float] | None:
    """Interval of r where y * R(r, J) < 1, or None when it is empty.

    The two edges bracket the minimizer r* and are located by bisection to
    1e-10 in r.  At y = 1 the lower edge is r = 0 exactly (R(0) = 1 sits on
    the threshold).
    """
    if y < 1.0:
        raise ValueError(f"y must be >= 1, got {y}")
    if not J > 0.0:
        return None
    opt = optimal_squeezing(gamma, J)
    if y * opt.R_star >= 1.0:
        return None

    def f(r: float) -> float:
        return y * R_function(gamma, J, r) - 1.0

    # lower edge
    if f(0.0) <= 0.0:
        r_low = 0.0
    else:
        r_low = float(bisect(f, 0.0, opt.r_star, xtol=1e-10))
    # upper edge: expand until yR > 1 again (R grows without bound in r)
    hi = max(2.0 * opt.r_star, 1.0)
    while f(hi) <= 0.0:
        hi *= 2.0
    r_high = float(bisect(f, opt.r_star, hi, xtol=1e-10))
    return r_low, r_high
