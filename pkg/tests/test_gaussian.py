"""Core drift/diffusion construction, Lyapunov solve and entanglement measures."""

import math

import numpy as np
import pytest
from conftest import (
    kron_solve,
    random_bath,
    random_physical_cov,
    random_stable_pair,
    random_symplectic,
    random_system,
)

from sqsteady.analytic import R_function
from sqsteady.gaussian import (
    OMEGA,
    BathSpec,
    CovarianceMatrix,
    NotPositiveDefinite,
    NotStable,
    SystemParams,
    build_diffusion_rotating,
    build_drift_rotating,
    derive_bath_params,
    log_negativity,
    partial_transpose,
    solve_lyapunov,
    steady_state,
    symplectic_eigenvalues,
)


class TestBathParams:
    def test_vacuum(self):
        b = derive_bath_params(BathSpec(0.0, 0.0, 0.0))
        assert b.N == 0.0
        assert b.M == 0.0

    def test_pure_squeezed(self):
        b = derive_bath_params(BathSpec(0.0, 1.0, 0.0))
        assert b.N == pytest.approx(math.sinh(1.0) ** 2, abs=1e-15)
        assert b.M == pytest.approx(-0.5 * math.sinh(2.0), abs=1e-15)

    def test_squeezed_thermal(self):
        b = derive_bath_params(BathSpec(1.0, 0.5, math.pi / 4.0))
        assert b.N == pytest.approx(math.cosh(1.0) + math.sinh(0.5) ** 2, abs=1e-14)
        assert b.M == pytest.approx(-1.5 * math.sinh(1.0) * np.exp(0.5j * math.pi), abs=1e-14)
        assert abs(b.M) < math.sqrt(b.N * (b.N + 1.0))

    def test_physicality_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            b = derive_bath_params(random_bath(rng))
            assert abs(b.M) <= math.sqrt(b.N * (b.N + 1.0)) + 1e-12

    def test_bound_saturates_at_zero_temperature(self):
        b = derive_bath_params(BathSpec(0.0, 0.7, 1.3))
        assert abs(b.M) == pytest.approx(math.sqrt(b.N * (b.N + 1.0)), abs=1e-14)

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError, match="nbar"):
            BathSpec(nbar=-0.1)
        with pytest.raises(ValueError, match="r must"):
            BathSpec(r=-1.0)

    def test_phase_stored_mod_2pi(self):
        assert BathSpec(phi=2.5 * math.pi).phi == pytest.approx(0.5 * math.pi)


class TestDrift:
    def test_symmetric_resonant_matrix(self):
        a = build_drift_rotating(SystemParams(1.0, 1.0, 0.7, 0.5, 0.5))
        g, j = 0.5, 0.7
        expected = np.array(
            [
                [-g / 2, 0, 0, j],
                [0, -g / 2, -j, 0],
                [0, j, -g / 2, 0],
                [-j, 0, 0, -g / 2],
            ]
        )
        np.testing.assert_allclose(a, expected, atol=1e-15)

    def test_decoupled_modes(self):
        a = build_drift_rotating(SystemParams(1.0, 1.0, 0.0, 0.4, 0.8))
        np.testing.assert_allclose(a, -np.diag([0.4, 0.4, 0.8, 0.8]) / 2.0, atol=1e-15)

    def test_hurwitz_at_resonance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a = build_drift_rotating(random_system(rng))
            assert np.max(np.linalg.eigvals(a).real) < 0.0

    def test_matches_complex_amplitude_equations(self):
        # independent route: Euler-step the complex amplitude equations
        # alpha1' = -g1/2 a1 - iJ a2 (+ detuning on mode 2), map to quadratures,
        # and finite-difference the mean against A <X>.
        sys_p = SystemParams(1.0, 0.8, 0.6, 0.5, 0.9)
        a = build_drift_rotating(sys_p)
        rng = np.random.default_rng(3)
        alpha = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        delta = sys_p.omega1 - sys_p.omega2

        def quad(al):
            return np.array(
                [al[0].real, al[0].imag, al[1].real, al[1].imag]
            ) * math.sqrt(2.0)

        dal = np.array(
            [
                -sys_p.gamma1 / 2.0 * alpha[0] - 1j * sys_p.J * alpha[1],
                -sys_p.gamma2 / 2.0 * alpha[1] - 1j * sys_p.J * alpha[0]
                + 1j * delta * alpha[1],
            ]
        )
        h = 1e-7
        fd = (quad(alpha + h * dal) - quad(alpha)) / h
        np.testing.assert_allclose(fd, a @ quad(alpha), rtol=1e-6, atol=1e-6)


class TestDiffusion:
    def test_vacuum_half_quantum(self):
        sys_p = SystemParams(1.0, 1.0, 0.0, 0.5, 0.5)
        vac = derive_bath_params(BathSpec())
        d = build_diffusion_rotating(sys_p, vac, vac)
        np.testing.assert_allclose(d, 0.25 * np.eye(4), atol=1e-15)

    def test_squeezed_vacuum_fixed_point(self):
        # pins the sign convention: single decoupled mode relaxes to
        # V_xx = e^{-2r}/2, V_pp = e^{+2r}/2 for phi = 0
        r = 0.6
        sys_p = SystemParams(1.0, 1.0, 0.0, 0.5, 0.5)
        v = steady_state(sys_p, BathSpec(0.0, r, 0.0), BathSpec()).entries
        assert v[0, 0] == pytest.approx(math.exp(-2.0 * r) / 2.0, abs=1e-12)
        assert v[1, 1] == pytest.approx(math.exp(2.0 * r) / 2.0, abs=1e-12)
        assert v[2, 2] == pytest.approx(0.5, abs=1e-12)

    def test_block_diagonal_symmetric(self):
        rng = np.random.default_rng(4)
        sys_p = random_system(rng)
        d = build_diffusion_rotating(
            sys_p,
            derive_bath_params(random_bath(rng)),
            derive_bath_params(random_bath(rng)),
        )
        np.testing.assert_allclose(d, d.T, atol=1e-15)
        assert np.all(d[:2, 2:] == 0.0)


class TestLyapunov:
    def test_thermal_fixed_point(self):
        gamma, nbar = 0.7, 1.3
        a = -(gamma / 2.0) * np.eye(4)
        d = gamma * (nbar + 0.5) * np.eye(4)
        v = solve_lyapunov(a, d).entries
        np.testing.assert_allclose(v, (nbar + 0.5) * np.eye(4), atol=1e-12)

    def test_against_kronecker_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            a, d = random_stable_pair(rng)
            v = solve_lyapunov(a, d).entries
            np.testing.assert_allclose(v, kron_solve(a, d), atol=1e-10)
            assert np.max(np.abs(a @ v + v @ a.T + d)) <= 1e-10

    def test_not_stable_raises(self):
        with pytest.raises(NotStable):
            solve_lyapunov(np.zeros((4, 4)), np.eye(4))
        # marginally stable direction (gamma -> 0 limit on one mode)
        a = np.diag([-0.5, -0.5, 0.0, 0.0])
        with pytest.raises(NotStable):
            solve_lyapunov(a, np.eye(4))

    def test_analytic_cross_check(self):
        sys_p = SystemParams(1.0, 1.0, 0.7, 0.5, 0.5)
        bath = BathSpec(0.0, 0.1, 0.0)
        nu = log_negativity(steady_state(sys_p, bath, bath)).nu_minus
        assert nu == pytest.approx(0.5 * R_function(0.5, 0.7, 0.1), abs=1e-9)


class TestPartialTranspose:
    def test_vacuum_invariant(self):
        v = 0.5 * np.eye(4)
        np.testing.assert_array_equal(partial_transpose(v), v)

    def test_involution(self):
        rng = np.random.default_rng(6)
        v = random_physical_cov(rng)
        np.testing.assert_array_equal(partial_transpose(partial_transpose(v)), v)

    def test_mode1_only_unchanged(self):
        v = 0.5 * np.eye(4)
        v[0, 0], v[1, 1], v[0, 1] = 0.9, 0.8, 0.1
        v[1, 0] = v[0, 1]
        np.testing.assert_array_equal(partial_transpose(v), v)


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        assert symplectic_eigenvalues(0.5 * np.eye(4)) == pytest.approx((0.5, 0.5))

    def test_pure_squeezed_times_vacuum(self):
        a = 1.7
        v = np.diag([a, 1.0 / (4.0 * a), 0.5, 0.5])
        nus = symplectic_eigenvalues(v)
        assert nus == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_thermal(self):
        nbar = 0.8
        v = (nbar + 0.5) * np.eye(4)
        assert symplectic_eigenvalues(v) == pytest.approx((nbar + 0.5, nbar + 0.5))

    def test_both_paths_agree(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            v = random_physical_cov(rng)
            generic = symplectic_eigenvalues(v)
            closed = symplectic_eigenvalues(v, method="invariants")
            assert generic == pytest.approx(closed, abs=1e-10)

    def test_symplectic_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            v = random_physical_cov(rng)
            s = random_symplectic(rng)
            assert np.max(np.abs(s.T @ OMEGA @ s - OMEGA)) < 1e-10
            nus = symplectic_eigenvalues(v)
            nus_t = symplectic_eigenvalues(s.T @ v @ s)
            assert nus_t == pytest.approx(nus, abs=1e-9)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            symplectic_eigenvalues(np.diag([1.0, 1.0, 1.0, -0.1]))


class TestLogNegativity:
    def test_vacuum_separable(self):
        res = log_negativity(0.5 * np.eye(4))
        assert res.E_N == 0.0
        assert not res.entangled

    def test_two_mode_squeezed_state(self):
        r = 0.4
        z = np.diag([1.0, -1.0])
        c, s = math.cosh(2.0 * r) * np.eye(2), math.sinh(2.0 * r) * z
        v = 0.5 * np.block([[c, s], [s, c]])
        res = log_negativity(v)
        assert res.nu_minus == pytest.approx(math.exp(-2.0 * r) / 2.0, abs=1e-12)
        assert res.E_N == pytest.approx(2.0 * r / math.log(2.0), abs=1e-10)

    def test_reference_point(self):
        sys_p = SystemParams(1.0, 1.0, 0.7, 0.5, 0.5)
        bath = BathSpec(0.0, 0.1, 0.0)
        res = log_negativity(steady_state(sys_p, bath, bath))
        big_r = R_function(0.5, 0.7, 0.1)
        assert big_r == pytest.approx(0.9560408784, abs=1e-9)
        assert res.E_N == pytest.approx(-math.log2(big_r), abs=1e-9)

    def test_consistency_flag(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            res = log_negativity(random_physical_cov(rng))
            assert res.entangled == (res.nu_minus < 0.5)
            assert res.entangled == (res.E_N > 0.0)
            assert res.E_N == max(0.0, -math.log2(2.0 * res.nu_minus))


class TestSteadyStateProperties:
    def test_local_dissipation_alone_cannot_entangle(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            sys_p = SystemParams(
                1.0, 1.0, 0.0, rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)
            )
            v = steady_state(sys_p, random_bath(rng), random_bath(rng))
            assert log_negativity(v).E_N == 0.0

    def test_unsqueezed_baths_cannot_entangle(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            sys_p = random_system(rng)
            b1 = BathSpec(rng.uniform(0.0, 2.0), 0.0, 0.0)
            b2 = BathSpec(rng.uniform(0.0, 2.0), 0.0, 0.0)
            assert log_negativity(steady_state(sys_p, b1, b2)).E_N == 0.0

    def test_physicality(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            v = steady_state(random_system(rng), random_bath(rng), random_bath(rng))
            assert v.is_physical(tol=1e-10)
            assert symplectic_eigenvalues(v)[0] >= 0.5 - 1e-10

    def test_detuned_rotating_frame_stable(self):
        sys_p = SystemParams(1.0, 0.7, 0.4, 0.5, 0.5)
        v = steady_state(sys_p, BathSpec(0.0, 0.3, 0.0), BathSpec(0.0, 0.3, 0.0))
        assert v.is_physical(tol=1e-10)


class TestCovarianceMatrixType:
    def test_rejects_asymmetric(self):
        m = 0.5 * np.eye(4)
        m[0, 1] = 1e-6
        with pytest.raises(ValueError, match="symmetric"):
            CovarianceMatrix(m)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="4x4"):
            CovarianceMatrix(np.eye(2))

    def test_vacuum_constructor(self):
        assert CovarianceMatrix.vacuum().is_physical()
