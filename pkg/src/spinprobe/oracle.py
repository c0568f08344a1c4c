"""Dense full-Hilbert-space reference simulation (n <= 8 bath spins).

This module rebuilds everything the analytic pipeline computes -- Gibbs
states, pulse/projection preparations, unitary evolution, partial traces and
finite-difference Fisher information -- from nothing but Kronecker products
and dense eigendecompositions.  It shares no formulas with the class-sum
machinery, so agreement between the two is a genuine cross-check.

Basis order: probe qubit (x) bath spin 1 (x) ... (x) bath spin n, each factor
in the sigma_z basis with index 0 = up.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .model import (IDENTITY2, SIGMA_X, SIGMA_Z, DomainError, ModelParams,
                    ParameterError, density_to_bloch, validate_params)

MAX_ORACLE_SPINS = 8

# Preparation pulse: exp(i (pi/4) sigma_y) = (I + i sigma_y)/sqrt(2).
# Applied to the low-temperature ground state (down along z for eps0 >> delta)
# it produces a state up along +x.
R_PULSE = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / math.sqrt(2.0)

PLUS_X = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
PROJ_PLUS_X = np.outer(PLUS_X, PLUS_X.conj())

# 8th-order central first-derivative stencil, offsets -4 .. +4.
_FD8_OFFSETS = np.array([-4, -3, -2, -1, 1, 2, 3, 4])
_FD8_WEIGHTS = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def _kron_chain(ops) -> np.ndarray:
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a bath single-site operator (site index 0-based, probe excluded)."""
    mats = [IDENTITY2] * (n_sites + 1)
    mats[site + 1] = op
    return _kron_chain(mats)


class DenseModel:
    """Dense (n+1)-spin model bound to one parameter set.

    Hamiltonians and their eigendecompositions are cached; thermal states for
    arbitrary beta reuse the cached spectra.
    """

    def __init__(self, p: ModelParams):
        p = validate_params(p)
        if p.n > MAX_ORACLE_SPINS:
            raise ParameterError(
                f"dense oracle is limited to n <= {MAX_ORACLE_SPINS}, got n = {p.n}")
        self.params = p
        self.dim_bath = 2 ** p.n
        self.dim = 2 * self.dim_bath
        self._ham: dict[str, np.ndarray] = {}
        self._eig: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    # -- construction ------------------------------------------------------

    def hamiltonian(self, phase: str) -> np.ndarray:
        """Total Hamiltonian; ``phase`` is "before" (eps0) or "after" (eps)."""
        if phase not in ("before", "after"):
            raise ParameterError(f"phase must be 'before' or 'after', got {phase!r}")
        if phase in self._ham:
            return self._ham[phase]
        p = self.params
        n = p.n
        spacing = p.eps0 if phase == "before" else p.eps
        eye_bath = np.eye(self.dim_bath, dtype=complex)

        h = np.kron(0.5 * spacing * SIGMA_Z + 0.5 * p.delta * SIGMA_X, eye_bath)

        omega = p.omega_list
        chi = p.chi_list
        z_site = [_site_operator(SIGMA_Z, i, n) for i in range(n)]
        for i in range(n):
            h = h + 0.5 * omega[i] * z_site[i]
        bonds = [(i, (i + 1) % n) for i in range(n)] if p.boundary == "periodic" \
            else [(i, i + 1) for i in range(n - 1)]
        for b, (i, j) in enumerate(bonds):
            zz = _site_operator(SIGMA_Z, i, n) @ _site_operator(SIGMA_Z, j, n)
            h = h + chi[b] * zz
        coupling = sum(z_site)
        h = h + 0.5 * p.g * (np.kron(SIGMA_Z, eye_bath) @ coupling)
        self._ham[phase] = h
        return h

    def eig(self, phase: str) -> tuple[np.ndarray, np.ndarray]:
        if phase not in self._eig:
            energies, vectors = np.linalg.eigh(self.hamiltonian(phase))
            self._eig[phase] = (energies, vectors)
        return self._eig[phase]

    def bath_hamiltonian(self) -> np.ndarray:
        """Bath-only Hamiltonian on the bath factor (no probe)."""
        p = self.params
        n = p.n
        dim = self.dim_bath
        h = np.zeros((dim, dim), dtype=complex)
        omega = p.omega_list
        chi = p.chi_list
        mats = [np.eye(2, dtype=complex)] * n

        def bath_site(op, i):
            ops = list(mats)
            ops[i] = op
            return _kron_chain(ops)

        for i in range(n):
            h = h + 0.5 * omega[i] * bath_site(SIGMA_Z, i)
        bonds = [(i, (i + 1) % n) for i in range(n)] if p.boundary == "periodic" \
            else [(i, i + 1) for i in range(n - 1)]
        for b, (i, j) in enumerate(bonds):
            h = h + chi[b] * (bath_site(SIGMA_Z, i) @ bath_site(SIGMA_Z, j))
        return h

    # -- state preparation -------------------------------------------------

    @staticmethod
    def _thermal_from_eig(energies: np.ndarray, vectors: np.ndarray, beta: float) -> np.ndarray:
        w = np.exp(-beta * (energies - energies.min()))
        w /= w.sum()
        return (vectors * w) @ vectors.conj().T

    def thermal_total(self, beta: float | None = None, phase: str = "before") -> np.ndarray:
        """Joint Gibbs state exp(-beta*H)/Z of the given Hamiltonian phase."""
        beta = self.params.beta if beta is None else beta
        energies, vectors = self.eig(phase)
        return self._thermal_from_eig(energies, vectors, beta)

    def prepare_total_state(self, mode, beta: float | None = None) -> np.ndarray:
        """Initial joint state for one of the four preparation modes.

        Correlated modes start from the joint Gibbs state of the "before"
        Hamiltonian and apply the pulse (unitary) or the |+x> projection
        (selective, renormalized).  Uncorrelated modes build the probe
        factor alone (pulsed thermal state or |+x><+x|) and attach the
        bath-only Gibbs state.
        """
        from .dynamics import PreparationMode  # local import to avoid a cycle

        mode = PreparationMode(mode)
        beta = self.params.beta if beta is None else beta
        p = self.params
        eye_bath = np.eye(self.dim_bath, dtype=complex)

        if mode in (PreparationMode.PULSE_CORRELATED, PreparationMode.PROJECTIVE_CORRELATED):
            rho = self.thermal_total(beta, phase="before")
            if mode is PreparationMode.PULSE_CORRELATED:
                u = np.kron(R_PULSE, eye_bath)
                return u @ rho @ u.conj().T
            proj = np.kron(PROJ_PLUS_X, eye_bath)
            projected = proj @ rho @ proj
            norm = np.trace(projected).real
            if norm < 1e-300:
                raise DomainError("projection overlap underflow")
            return projected / norm

        h_probe = 0.5 * p.eps0 * SIGMA_Z + 0.5 * p.delta * SIGMA_X
        bath_e, bath_v = np.linalg.eigh(self.bath_hamiltonian())
        rho_bath = self._thermal_from_eig(bath_e, bath_v, beta)
        if mode is PreparationMode.PULSE_UNCORRELATED:
            e, v = np.linalg.eigh(R_PULSE @ h_probe @ R_PULSE.conj().T)
            rho_probe = self._thermal_from_eig(e, v, beta)
        else:
            rho_probe = PROJ_PLUS_X.copy()
        return np.kron(rho_probe, rho_bath)

    # -- evolution and reduction -------------------------------------------

    def reduced_trajectory(self, rho0: np.ndarray, ts) -> np.ndarray:
        """Probe reduced states Tr_B[U(t) rho0 U(t)^dag] for an array of times.

        One eigendecomposition of the "after" Hamiltonian serves every time:
        in its eigenbasis the evolved matrix is a phase modulation of rho0,
        and the partial trace becomes a fixed contraction.
        """
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        energies, vectors = self.eig("after")
        rho_eig = vectors.conj().T @ rho0 @ vectors
        # M[a, b][j, k] = sum_m V[(a,m), j] * conj(V[(b,m), k])
        v3 = vectors.reshape(2, self.dim_bath, self.dim)
        phases = np.exp(-1j * np.outer(energies, ts))  # (dim, nt)
        out = np.zeros((ts.size, 2, 2), dtype=complex)
        for a in range(2):
            for b in range(a, 2):
                m_ab = v3[a].T @ v3[b].conj()
                contracted = (m_ab * rho_eig)  # (dim, dim) over (j, k)
                # sum_jk contracted[j,k] * phases[j,t] * conj(phases[k,t])
                g = contracted @ phases.conj()
                vals = np.sum(phases * g, axis=0)
                out[:, a, b] = vals
                if b != a:
                    out[:, b, a] = vals.conj()
        return out

    def reduced_state(self, rho0: np.ndarray, t: float) -> np.ndarray:
        return self.reduced_trajectory(rho0, [t])[0]

    def bloch_trajectory(self, mode, ts, beta: float | None = None) -> np.ndarray:
        rho0 = self.prepare_total_state(mode, beta=beta)
        reduced = self.reduced_trajectory(rho0, ts)
        return np.array([density_to_bloch(r) for r in reduced])


# -- module-level conveniences (one-shot wrappers) ---------------------------

def build_total_hamiltonian(p: ModelParams, phase: str) -> np.ndarray:
    return DenseModel(p).hamiltonian(phase)


def prepare_total_state(p: ModelParams, mode) -> np.ndarray:
    return DenseModel(p).prepare_total_state(mode)


def oracle_reduced_state(rho0: np.ndarray, p: ModelParams, t: float) -> np.ndarray:
    return DenseModel(p).reduced_state(rho0, t)


def oracle_bloch(p: ModelParams, mode, ts) -> np.ndarray:
    return DenseModel(p).bloch_trajectory(mode, ts)


def oracle_qfi(p: ModelParams, mode, t: float, which, rel_step: float = 1e-2) -> float:
    """Fisher information from an 8th-order finite-difference state derivative.

    ``which`` is an :class:`~spinprobe.qfi.Estimator`; the derivative is taken
    with respect to T or g by rebuilding the dense preparation at shifted
    parameter values (for T, only the Boltzmann weights change and the cached
    eigendecompositions are reused).
    """
    from .qfi import Estimator, qfi_eigen

    which = Estimator(which)
    p = validate_params(p)
    x0 = p.T if which is Estimator.TEMPERATURE else p.g
    h = rel_step * max(abs(x0), 1e-3)
    if which is Estimator.TEMPERATURE:
        h = min(h, x0 / 8.0)  # keep every stencil point at positive T
        model = DenseModel(p)
        rho = model.reduced_state(model.prepare_total_state(mode), t)
        drho = np.zeros((2, 2), dtype=complex)
        for offset, weight in zip(_FD8_OFFSETS, _FD8_WEIGHTS):
            beta_shift = 1.0 / (x0 + offset * h)
            rho_shift = model.reduced_state(
                model.prepare_total_state(mode, beta=beta_shift), t)
            drho = drho + weight * rho_shift
        drho /= h
    else:
        model = DenseModel(p)
        rho = model.reduced_state(model.prepare_total_state(mode), t)
        drho = np.zeros((2, 2), dtype=complex)
        for offset, weight in zip(_FD8_OFFSETS, _FD8_WEIGHTS):
            shifted = DenseModel(replace(p, g=x0 + offset * h))
            rho_shift = shifted.reduced_state(shifted.prepare_total_state(mode), t)
            drho = drho + weight * rho_shift
        drho /= h
    return qfi_eigen(rho, drho)
