"""Core primitive checks: thermal qubit weights and Bloch rotations.

The independent oracles here are dense 2x2 linear algebra: scipy's
scaling-and-squaring expm for the thermal weights, and explicit unitary
conjugation U rho U^dag for the rotations.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from spinprobe import (ModelParams, ParameterError, bloch_to_density,
                       check_qubit_density, density_to_bloch,
                       qubit_exp_weights, rodrigues_rotate, rotation_matrix,
                       validate_params)
from spinprobe.model import IDENTITY2, PAULI, SIGMA_X, SIGMA_Z, DomainError


def dense_exp_weights(az, ax, beta):
    h = 0.5 * az * SIGMA_Z + 0.5 * ax * SIGMA_X
    m = scipy.linalg.expm(-beta * h)
    J = np.trace(m).real
    b = np.array([np.trace(m @ s).real for s in PAULI])
    return J, b


def dense_rotate(xi, delta, t, r0):
    h = 0.5 * xi * SIGMA_Z + 0.5 * delta * SIGMA_X
    u = scipy.linalg.expm(-1j * h * t)
    rho = u @ bloch_to_density(r0) @ u.conj().T
    return density_to_bloch(rho)


class TestValidateParams:
    def test_scalar_broadcast(self):
        p = validate_params(ModelParams(n=50, eps0=4.0, eps=2.0, delta=1.0, omega=1))
        assert p.omega == 1.0
        assert p.omega_list.shape == (50,)
        assert np.all(p.omega_list == 1.0)

    def test_chi_needs_n_bonds_on_ring(self):
        p = ModelParams(n=10, eps0=4.0, eps=2.0, delta=1.0, chi=tuple([0.1] * 9))
        with pytest.raises(ParameterError):
            validate_params(p)
        # the same list is fine on an open chain (9 bonds)
        ok = validate_params(ModelParams(n=10, eps0=4.0, eps=2.0, delta=1.0,
                                         chi=tuple([0.1] * 9), boundary="open"))
        assert ok.chi_list.shape == (9,)

    def test_fig1_parameter_set_accepted(self):
        p = validate_params(ModelParams(n=50, eps0=4.0, eps=2.0, delta=1.0,
                                        omega=1.0, chi=0.0, g=0.01))
        assert p.n == 50 and p.uniform

    @pytest.mark.parametrize("bad", [
        dict(T=0.0), dict(T=-1.0), dict(n=0), dict(eps0=math.inf),
        dict(boundary="twisted"), dict(omega=(1.0, 1.0)),
    ])
    def test_rejects(self, bad):
        base = dict(n=4, eps0=4.0, eps=2.0, delta=1.0)
        base.update(bad)
        with pytest.raises(ParameterError):
            validate_params(ModelParams(**base))

    def test_beta_derived(self):
        p = validate_params(ModelParams(n=2, eps0=4.0, eps=2.0, delta=1.0, T=0.5))
        assert p.beta == 2.0


class TestQubitExpWeights:
    def test_identity_hamiltonian(self):
        w = qubit_exp_weights(0.0, 0.0, 1.0)
        assert w.J == 2.0
        assert np.all(w.b == 0.0)

    def test_direct_formula(self):
        # az=4, ax=1, beta=1: eta = sqrt(17)/2
        eta = math.sqrt(17.0) / 2.0
        w = qubit_exp_weights(4.0, 1.0, 1.0)
        assert w.J == pytest.approx(2.0 * math.cosh(eta), rel=1e-15)
        expected = -(math.sinh(eta) / eta) * np.array([1.0, 0.0, 4.0])
        np.testing.assert_allclose(w.b, expected, rtol=1e-15)

    def test_matches_dense_exponential(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(1000):
            az = rng.uniform(-10, 10)
            ax = rng.uniform(-10, 10)
            beta = rng.uniform(0, 5)
            w = qubit_exp_weights(az, ax, beta)
            J_ref, b_ref = dense_exp_weights(az, ax, beta)
            scale = max(abs(J_ref), 1.0)
            worst = max(worst, abs(w.J - J_ref) / scale,
                        float(np.max(np.abs(w.b - b_ref))) / scale)
        assert worst <= 1e-12

    def test_beta_zero(self):
        w = qubit_exp_weights(3.0, -2.0, 0.0)
        assert w.J == 2.0
        assert np.all(w.b == 0.0)

    def test_bloch_norm_bounded_by_trace(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            w = qubit_exp_weights(rng.uniform(-10, 10), rng.uniform(-10, 10),
                                  rng.uniform(0, 5))
            assert np.linalg.norm(w.b) <= w.J * (1 + 1e-12)

    def test_negative_beta_rejected(self):
        with pytest.raises(ParameterError):
            qubit_exp_weights(1.0, 1.0, -0.1)


class TestRodriguesRotate:
    def test_t_zero_identity(self):
        r0 = np.array([0.3, -0.2, 0.5])
        np.testing.assert_array_equal(rodrigues_rotate(2.0, 1.0, 0.0, r0), r0)

    def test_full_period(self):
        xi, delta = 2.0, 1.0
        eta = 0.5 * math.hypot(xi, delta)
        r0 = np.array([0.3, -0.2, 0.5])
        r = rodrigues_rotate(xi, delta, math.pi / eta, r0)
        np.testing.assert_allclose(r, r0, atol=1e-12)

    def test_degenerate_generator_is_identity(self):
        r0 = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(rodrigues_rotate(0.0, 0.0, 5.0, r0), r0)

    def test_norm_preserved(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            r0 = rng.normal(size=3)
            xi, delta, t = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 10)
            r = rodrigues_rotate(xi, delta, t, r0)
            assert abs(np.linalg.norm(r) - np.linalg.norm(r0)) <= 1e-12 * max(
                1.0, np.linalg.norm(r0))

    def test_composition(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            r0 = rng.normal(size=3)
            xi, delta = rng.uniform(-5, 5), rng.uniform(-5, 5)
            t1, t2 = rng.uniform(0, 5, size=2)
            two_step = rodrigues_rotate(xi, delta, t2,
                                        rodrigues_rotate(xi, delta, t1, r0))
            one_step = rodrigues_rotate(xi, delta, t1 + t2, r0)
            np.testing.assert_allclose(two_step, one_step, atol=1e-10)

    def test_x_column_matches_propagator_triple(self):
        xi, delta = 2.0, 1.0
        eta = 0.5 * math.hypot(xi, delta)
        for t in (0.05, 0.3, 1.7, 4.0):
            r = rodrigues_rotate(xi, delta, t, np.array([1.0, 0.0, 0.0]))
            theta_xx = (delta**2 + xi**2 * math.cos(2 * eta * t)) / (4 * eta**2)
            theta_yx = (xi / (2 * eta)) * math.sin(2 * eta * t)
            theta_zx = (xi * delta / (2 * eta**2)) * math.sin(eta * t) ** 2
            np.testing.assert_allclose(r, [theta_xx, theta_yx, theta_zx], atol=1e-14)
            np.testing.assert_allclose(rotation_matrix(xi, delta, t)[:, 0],
                                       [theta_xx, theta_yx, theta_zx], atol=1e-14)

    def test_matches_dense_unitary_evolution(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            r0 = rng.normal(size=3)
            r0 /= max(1.0, np.linalg.norm(r0))  # keep the state physical
            xi, delta, t = rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(0, 8)
            ours = rodrigues_rotate(xi, delta, t, r0)
            ref = dense_rotate(xi, delta, t, r0)
            np.testing.assert_allclose(ours, ref, atol=1e-12)

    def test_rotation_matrix_is_orthogonal(self):
        m = rotation_matrix(1.3, 0.7, 2.1)
        np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-13)


class TestDensityHelpers:
    def test_round_trip(self):
        r = np.array([0.2, -0.4, 0.5])
        np.testing.assert_allclose(density_to_bloch(bloch_to_density(r)), r,
                                   atol=1e-15)

    def test_check_density_accepts_physical(self):
        check_qubit_density(bloch_to_density([0.3, 0.1, -0.2]))

    def test_check_density_rejects_trace(self):
        with pytest.raises(DomainError):
            check_qubit_density(1.5 * IDENTITY2)

    def test_check_density_rejects_overlong_bloch(self):
        with pytest.raises(DomainError):
            check_qubit_density(bloch_to_density([1.2, 0.0, 0.0]), eig_floor=-1e-12)
