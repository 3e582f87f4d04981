"""Steady-state entanglement of coupled oscillators with squeezed thermal reservoirs."""

__version__ = "0.1.0"

from .gaussian import (  # noqa: F401
    BathSpec,
    CovarianceMatrix,
    DerivedBath,
    EntanglementResult,
    NotPositiveDefinite,
    NotStable,
    SystemParams,
    derive_bath_params,
    log_negativity,
    partial_transpose,
    solve_lyapunov,
    steady_state,
    symplectic_eigenvalues,
)
