"""Model parameters and the exact two-level-system primitives.

The probe is a single spin-1/2 with Hamiltonian (az/2)*sigma_z + (ax/2)*sigma_x
for various (az, ax); the bath consists of ``n`` spin-1/2 systems coupled to
the probe through sigma_z only.  Everything downstream is assembled from two
closed-form primitives defined here:

* :func:`qubit_exp_weights` -- trace and Pauli components of the thermal
  exponential exp(-beta*H2) of a 2x2 Hamiltonian of that form, and
* :func:`rodrigues_rotate` -- the Bloch-sphere rotation generated by the same
  Hamiltonian class over a time ``t``.

Units: hbar = k_B = 1.  Energies are dimensionless (measured in units of the
post-preparation probe level spacing), times in the inverse unit, and
temperature is an energy (beta = 1/T).

Conventions: Bloch vectors are float arrays of shape (3,); qubit density
matrices are complex arrays of shape (2, 2) with basis order (up, down) along
sigma_z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

BOUNDARIES = ("periodic", "open")


class ParameterError(ValueError):
    """Invalid model parameters or configuration input."""


class DomainError(ArithmeticError):
    """A computation left its numeric domain (e.g. pure-state radial derivative)."""


def _as_float_tuple(values, name: str, length: int) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != length:
        raise ParameterError(f"{name} list must have length {length}, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ParameterError(f"{name} entries must be finite")
    return out


@dataclass(frozen=True)
class ModelParams:
    """Full probe + bath parameter set.

    n         number of bath spins (>= 1)
    eps0      probe level spacing before the state preparation step
    eps       probe level spacing during the subsequent evolution
    delta     tunnelling amplitude (sigma_x coefficient, shared by both phases)
    omega     bath level spacing: scalar, or per-spin tuple of length n
    chi       intra-bath nearest-neighbour coupling: scalar, or per-bond tuple
              (n bonds on a periodic ring, n-1 on an open chain)
    g         probe-bath coupling strength
    T         bath temperature (> 0); beta = 1/T
    boundary  bath topology, "periodic" (default) or "open"
    """

    n: int
    eps0: float
    eps: float
    delta: float
    omega: float | tuple[float, ...] = 1.0
    chi: float | tuple[float, ...] = 0.0
    g: float = 0.01
    T: float = 1.0
    boundary: str = "periodic"

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def n_bonds(self) -> int:
        return self.n if self.boundary == "periodic" else self.n - 1

    @property
    def uniform(self) -> bool:
        """True when omega and chi are scalars (degeneracy collapse applies)."""
        return not isinstance(self.omega, tuple) and not isinstance(self.chi, tuple)

    @property
    def omega_list(self) -> np.ndarray:
        if isinstance(self.omega, tuple):
            return np.asarray(self.omega, dtype=float)
        return np.full(self.n, float(self.omega))

    @property
    def chi_list(self) -> np.ndarray:
        if isinstance(self.chi, tuple):
            return np.asarray(self.chi, dtype=float)
        return np.full(self.n_bonds, float(self.chi))


def params_echo(p: ModelParams) -> str:
    """One-line full parameter echo for CSV comment headers."""
    from .util import format_g17

    def render(v):
        if isinstance(v, tuple):
            return "[" + ",".join(format_g17(x) for x in v) + "]"
        return format_g17(v)

    return (f"params: n={p.n} eps0={render(p.eps0)} eps={render(p.eps)} "
            f"delta={render(p.delta)} omega={render(p.omega)} "
            f"chi={render(p.chi)} g={render(p.g)} T={render(p.T)} "
            f"boundary={p.boundary}")


def validate_params(p: ModelParams) -> ModelParams:
    """Check and normalize a parameter set.

    Scalar couplings stay scalar (expansion to per-spin arrays happens on
    demand via ``omega_list`` / ``chi_list``); list-valued couplings are
    normalized to float tuples.  Raises :class:`ParameterError` on
    non-positive temperature, wrong list lengths, or non-finite values.
    """
    if isinstance(p.n, bool) or int(p.n) != p.n or p.n < 1:
        raise ParameterError(f"n must be a positive integer, got {p.n!r}")
    n = int(p.n)
    if p.boundary not in BOUNDARIES:
        raise ParameterError(f"boundary must be one of {BOUNDARIES}, got {p.boundary!r}")
    scalars = {"eps0": p.eps0, "eps": p.eps, "delta": p.delta, "g": p.g, "T": p.T}
    for name, value in scalars.items():
        if not math.isfinite(float(value)):
            raise ParameterError(f"{name} must be finite, got {value!r}")
    if float(p.T) <= 0.0:
        raise ParameterError(f"T must be positive, got {p.T!r}")

    n_bonds = n if p.boundary == "periodic" else n - 1
    if isinstance(p.omega, (tuple, list, np.ndarray)):
        omega: float | tuple[float, ...] = _as_float_tuple(p.omega, "omega", n)
    else:
        omega = float(p.omega)
        if not math.isfinite(omega):
            raise ParameterError("omega must be finite")
    if isinstance(p.chi, (tuple, list, np.ndarray)):
        chi: float | tuple[float, ...] = _as_float_tuple(p.chi, "chi", n_bonds)
    else:
        chi = float(p.chi)
        if not math.isfinite(chi):
            raise ParameterError("chi must be finite")

    return ModelParams(
        n=n,
        eps0=float(p.eps0),
        eps=float(p.eps),
        delta=float(p.delta),
        omega=omega,
        chi=chi,
        g=float(p.g),
        T=float(p.T),
        boundary=p.boundary,
    )


@dataclass(frozen=True, eq=False)
class QubitExpWeights:
    """Trace and Pauli weights of exp(-beta*H2), H2 = (az/2)sz + (ax/2)sx.

    J  = Tr exp(-beta*H2) = 2 cosh(beta*eta),  eta = sqrt(az^2 + ax^2)/2
    b  = (Tr[exp(-beta*H2) sigma_k])_k = -(sinh(beta*eta)/eta) * (ax, 0, az)
    """

    J: float
    b: np.ndarray


def qubit_exp_weights(az: float, ax: float, beta: float) -> QubitExpWeights:
    """Closed-form thermal weights of a sigma_z/sigma_x qubit Hamiltonian.

    Exact for all finite inputs; the eta -> 0 degeneracy is handled by the
    series limit sinh(beta*eta)/eta -> beta.  Requires beta >= 0.
    """
    if beta < 0:
        raise ParameterError(f"beta must be non-negative, got {beta!r}")
    eta = 0.5 * math.hypot(az, ax)
    x = beta * eta
    J = 2.0 * math.cosh(x)
    if x < 1e-6:
        coef = beta * (1.0 + x * x / 6.0)
    else:
        coef = math.sinh(x) / eta
    b = -coef * np.array([ax, 0.0, az])
    return QubitExpWeights(J=J, b=b)


def rodrigues_rotate(xi: float, delta: float, t: float, r0) -> np.ndarray:
    """Rotate a Bloch vector under H = (xi/2)sigma_z + (delta/2)sigma_x.

    The generated motion is dr/dt = h x r with h = (delta, 0, xi): a rotation
    about the unit axis m = (delta, 0, xi)/(2*eta) by the angle 2*eta*t,
    eta = sqrt(xi^2 + delta^2)/2.  xi = delta = 0 returns r0 unchanged.
    """
    r0 = np.asarray(r0, dtype=float)
    eta = 0.5 * math.hypot(xi, delta)
    if eta == 0.0:
        return r0.copy()
    mx = delta / (2.0 * eta)
    mz = xi / (2.0 * eta)
    phi = 2.0 * eta * t
    c = math.cos(phi)
    s = math.sin(phi)
    m = np.array([mx, 0.0, mz])
    return c * r0 + s * np.cross(m, r0) + (1.0 - c) * np.dot(m, r0) * m


def rotation_matrix(xi: float, delta: float, t: float) -> np.ndarray:
    """The 3x3 Bloch rotation matrix of :func:`rodrigues_rotate`.

    Its first column is the propagator triple
    ((delta^2 + xi^2 cos(2 eta t))/(4 eta^2),
     (xi/(2 eta)) sin(2 eta t),
     (xi delta/(2 eta^2)) sin^2(eta t)).
    """
    eta = 0.5 * math.hypot(xi, delta)
    if eta == 0.0:
        return np.eye(3)
    mx = delta / (2.0 * eta)
    mz = xi / (2.0 * eta)
    phi = 2.0 * eta * t
    c = math.cos(phi)
    s = math.sin(phi)
    oc = 1.0 - c
    return np.array(
        [
            [c + oc * mx * mx, -s * mz, oc * mx * mz],
            [s * mz, c, -s * mx],
            [oc * mx * mz, s * mx, c + oc * mz * mz],
        ]
    )


def bloch_to_density(r) -> np.ndarray:
    """Map a Bloch vector to the 2x2 density matrix (I + r.sigma)/2."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (IDENTITY2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def density_to_bloch(rho) -> np.ndarray:
    """Extract (Tr[rho sx], Tr[rho sy], Tr[rho sz]) from a 2x2 matrix."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULI])


def check_qubit_density(rho, trace_tol: float = 1e-12, herm_tol: float = 1e-12,
                        eig_floor: float = -1e-12) -> None:
    """Raise :class:`DomainError` unless rho is a physical qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise DomainError(f"trace deviates from 1: {np.trace(rho)}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise DomainError("matrix is not Hermitian within tolerance")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < eig_floor:
        raise DomainError(f"negative eigenvalue {evals.min()}")
