"""Dense-oracle self-checks: Hamiltonian assembly, preparations, evolution."""

import numpy as np
import pytest

from spinprobe import (DenseModel, ModelParams, ParameterError,
                       PreparationMode, bath_spectrum, build_total_hamiltonian,
                       validate_params)
from spinprobe.model import IDENTITY2, SIGMA_X, SIGMA_Z
from spinprobe.oracle import R_PULSE, prepare_total_state


def params(**kw):
    base = dict(n=4, eps0=4.0, eps=2.0, delta=1.0, omega=1.0, chi=0.1, g=0.5, T=1.0)
    base.update(kw)
    return validate_params(ModelParams(**base))


class TestHamiltonian:
    def test_single_spin_matrix(self):
        p = params(n=1, eps0=4.0, delta=1.0, omega=1.0, chi=0.0, g=0.5)
        h = build_total_hamiltonian(p, "before")
        expected = (np.kron(2.0 * SIGMA_Z + 0.5 * SIGMA_X, IDENTITY2)
                    + np.kron(IDENTITY2, 0.5 * SIGMA_Z)
                    + 0.25 * np.kron(SIGMA_Z, SIGMA_Z))
        np.testing.assert_allclose(h, expected, atol=1e-15)

    def test_hermitian(self):
        for phase in ("before", "after"):
            h = build_total_hamiltonian(params(), phase)
            assert np.max(np.abs(h - h.conj().T)) <= 1e-12

    def test_phase_changes_probe_spacing_only(self):
        before = build_total_hamiltonian(params(), "before")
        after = build_total_hamiltonian(params(), "after")
        diff = before - after
        expected = np.kron(0.5 * (4.0 - 2.0) * SIGMA_Z, np.eye(16, dtype=complex))
        np.testing.assert_allclose(diff, expected, atol=1e-13)

    def test_probe_commutes_at_zero_tunnelling(self):
        p = params(delta=0.0)
        h = build_total_hamiltonian(p, "after")
        hs = np.kron(0.5 * p.eps * SIGMA_Z, np.eye(16, dtype=complex))
        comm = hs @ h - h @ hs
        assert np.max(np.abs(comm)) <= 1e-12

    def test_bath_spectrum_multiset(self):
        p = params(n=5, chi=0.1)
        model = DenseModel(p)
        dense_levels = np.sort(np.linalg.eigvalsh(model.bath_hamiltonian()))
        entries = bath_spectrum(p)
        analytic = np.sort(np.concatenate([
            np.full(e.mult, 0.5 * e.Omega + e.alpha) for e in entries]))
        np.testing.assert_allclose(dense_levels, analytic, atol=1e-12)

    def test_size_guard(self):
        with pytest.raises(ParameterError):
            DenseModel(params(n=9))

    def test_phase_name_validated(self):
        with pytest.raises(ParameterError):
            DenseModel(params()).hamiltonian("during")


class TestPreparation:
    @pytest.mark.parametrize("mode", list(PreparationMode))
    def test_unit_trace(self, mode):
        rho = prepare_total_state(params(), mode)
        assert abs(np.trace(rho).real - 1.0) <= 1e-12
        assert abs(np.trace(rho).imag) <= 1e-12

    @pytest.mark.parametrize("mode,partner", [
        (PreparationMode.PULSE_CORRELATED, PreparationMode.PULSE_UNCORRELATED),
        (PreparationMode.PROJECTIVE_CORRELATED, PreparationMode.PROJECTIVE_UNCORRELATED),
    ])
    def test_g_zero_factorizes(self, mode, partner):
        p = params(g=0.0)
        np.testing.assert_allclose(prepare_total_state(p, mode),
                                   prepare_total_state(p, partner), atol=1e-12)

    def test_pulse_points_up_along_x_at_low_temperature(self):
        # locks the sign convention of the preparation pulse
        p = params(T=0.05, g=0.01)
        model = DenseModel(p)
        rho = model.prepare_total_state(PreparationMode.PULSE_UNCORRELATED)
        reduced = np.trace(rho.reshape(2, 16, 2, 16), axis1=1, axis2=3)
        nx = np.trace(reduced @ SIGMA_X).real
        assert nx > 0.9

    def test_pulse_matrix_is_pi_half_y_rotation(self):
        np.testing.assert_allclose(R_PULSE @ R_PULSE.conj().T, IDENTITY2, atol=1e-15)
        # R sigma_z R^dag = -sigma_x and R sigma_x R^dag = sigma_z
        np.testing.assert_allclose(R_PULSE @ SIGMA_Z @ R_PULSE.conj().T, -SIGMA_X,
                                   atol=1e-15)
        np.testing.assert_allclose(R_PULSE @ SIGMA_X @ R_PULSE.conj().T, SIGMA_Z,
                                   atol=1e-15)


class TestEvolution:
    def test_t_zero_returns_marginal(self):
        p = params()
        model = DenseModel(p)
        rho0 = model.prepare_total_state(PreparationMode.PULSE_CORRELATED)
        marginal = np.trace(rho0.reshape(2, 16, 2, 16), axis1=1, axis2=3)
        np.testing.assert_allclose(model.reduced_state(rho0, 0.0), marginal,
                                   atol=1e-12)

    def test_dephasing_limit_keeps_populations(self):
        p = params(delta=0.0)
        model = DenseModel(p)
        rho0 = model.prepare_total_state(PreparationMode.PULSE_CORRELATED)
        diag0 = np.diag(model.reduced_state(rho0, 0.0)).real
        for t in (0.5, 2.0, 7.0):
            diag_t = np.diag(model.reduced_state(rho0, t)).real
            np.testing.assert_allclose(diag_t, diag0, atol=1e-12)

    def test_energy_and_purity_conserved(self):
        p = params()
        model = DenseModel(p)
        h_after = model.hamiltonian("after")
        energies, vectors = model.eig("after")
        rho0 = model.prepare_total_state(PreparationMode.PROJECTIVE_CORRELATED)
        ref_energy = np.trace(rho0 @ h_after).real
        ref_purity = np.trace(rho0 @ rho0).real
        for t in (0.3, 1.1, 4.7):
            u = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
            rho_t = u @ rho0 @ u.conj().T
            assert abs(np.trace(rho_t @ h_after).real - ref_energy) <= 1e-10
            assert abs(np.trace(rho_t @ rho_t).real - ref_purity) <= 1e-10

    def test_trajectory_matches_pointwise_evolution(self):
        p = params(n=3)
        model = DenseModel(p)
        rho0 = model.prepare_total_state(PreparationMode.PULSE_UNCORRELATED)
        energies, vectors = model.eig("after")
        ts = np.array([0.4, 1.9])
        fast = model.reduced_trajectory(rho0, ts)
        for i, t in enumerate(ts):
            u = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
            rho_t = u @ rho0 @ u.conj().T
            slow = np.trace(rho_t.reshape(2, 8, 2, 8), axis1=1, axis2=3)
            np.testing.assert_allclose(fast[i], slow, atol=1e-12)
