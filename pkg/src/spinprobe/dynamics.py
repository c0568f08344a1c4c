"""Prepared probe+bath ensembles and the exact reduced qubit dynamics.

Because the probe couples to the bath through sigma_z only, the joint
Hamiltonian is block-diagonal over bath configurations: each bath class with
collective eigenvalues (G, Omega, alpha) contributes an independent 2x2
problem with shifted probe level spacing.  The reduced state is therefore an
exactly weighted average over classes,

    r(t) = sum_n w_n R_n(t) b_n  /  sum_n w_n J_n,

where w_n = mult_n * exp(-beta*(Omega_n/2 + alpha_n)) is the Boltzmann weight
of the class, (J_n, b_n) is the trace/Bloch content of the prepared per-class
probe operator, and R_n(t) is the Bloch rotation generated by
(xi_n/2) sigma_z + (delta/2) sigma_x with xi_n = G_n + eps.

Four preparation modes are supported.  All start from thermal equilibrium at
inverse temperature beta and differ in (a) whether probe-bath correlations
present in the joint Gibbs state are kept ("Correlated") or the probe and
bath are taken as a product of their separate Gibbs states ("Uncorrelated"),
and (b) whether the probe is steered to +x by a unitary pulse
exp(i (pi/4) sigma_y) ("Pulse", non-selective, preserves mixedness) or by a
selective projective measurement onto |+x> ("Projective", prepares a pure
state).

Per-class contents:

    PulseCorrelated        J_n = 2 cosh(beta*eta0_n)
                           b_n = (sinh(beta*eta0_n)/eta0_n) * (eps0 + G_n, 0, -delta)
    PulseUncorrelated      the same with G_n = 0 for every class
    ProjectiveCorrelated   J_n = <+x| exp(-beta*H0_n) |+x>
                               = cosh(beta*eta0_n) - (delta/2) sinh(beta*eta0_n)/eta0_n
                           b_n = J_n * (1, 0, 0)
    ProjectiveUncorrelated J_n = 1, b_n = (1, 0, 0)

with eta0_n = sqrt((eps0 + G_n)^2 + delta^2)/2 the pre-switch per-class Rabi
energy.  The probe level spacing switches instantaneously from eps0 to eps at
t = 0.

Numerics: class sums use a single log-sum-exp shift (max log-weight) plus
Kahan compensation in a fixed (k, w)-sorted order, so results are
deterministic and survive beta*Omega spans of hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (DomainError, ModelParams, ParameterError, params_echo,
                    validate_params)
from .spectrum import SpectrumEntry, bath_spectrum
from .util import kahan_sum, write_csv_atomic

COHERENCE_FLOOR = 1e-300


class PreparationMode(str, Enum):
    PULSE_CORRELATED = "PulseCorrelated"
    PULSE_UNCORRELATED = "PulseUncorrelated"
    PROJECTIVE_CORRELATED = "ProjectiveCorrelated"
    PROJECTIVE_UNCORRELATED = "ProjectiveUncorrelated"

    @property
    def is_pulse(self) -> bool:
        return self in (PreparationMode.PULSE_CORRELATED, PreparationMode.PULSE_UNCORRELATED)

    @property
    def is_correlated(self) -> bool:
        return self in (PreparationMode.PULSE_CORRELATED, PreparationMode.PROJECTIVE_CORRELATED)


ALL_MODES = tuple(PreparationMode)


@dataclass(eq=False)
class PreparedEnsemble:
    """Per-class initial data of a prepared probe+bath state.

    Arrays are aligned and ordered by the (k, w) sort of the spectrum:
    log_weight[i] = log(mult_i) - beta*(Omega_i/2 + alpha_i), log_J[i] the log
    of the trace weight of the prepared per-class probe operator, b_hat[i] its
    J-normalized Bloch triple (norm <= 1), xi[i] = G_i + eps the evolution
    energy.  Carrying (log_J, b_hat) instead of raw (J, b0) keeps every term
    of the class sums bounded at extreme beta; the raw values are exposed as
    properties (they may overflow to inf where float64 cannot hold them).
    """

    mode: PreparationMode
    params: ModelParams
    log_weight: np.ndarray
    log_J: np.ndarray
    b_hat: np.ndarray
    xi: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.log_weight.size

    @property
    def J(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_J)

    @property
    def b0(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.b_hat * np.exp(self.log_J)[:, None]


@dataclass(frozen=True)
class DynamicsPoint:
    """Reduced probe state at one time, in derived coordinates.

    Gamma = -ln(nx^2 + ny^2)/2 (set to +inf when the coherence underflows),
    phase = atan2(ny, nx) normalized to (-pi, pi].
    """

    t: float
    r: np.ndarray
    Gamma: float
    phase: float

    @property
    def nz(self) -> float:
        return float(self.r[2])


def _log_2cosh(x: np.ndarray) -> np.ndarray:
    """log(2 cosh x) for x >= 0, safe for arbitrarily large x."""
    return x + np.log1p(np.exp(-2.0 * x))


def _tanh_over(eta: np.ndarray, beta: float) -> np.ndarray:
    """tanh(beta*eta)/eta with the series limit at eta -> 0."""
    x = beta * eta
    small = x < 1e-6
    safe_eta = np.where(eta > 0.0, eta, 1.0)
    return np.where(small, beta * (1.0 - x * x / 3.0), np.tanh(x) / safe_eta)


def prepare(p: ModelParams, mode, spectrum: list[SpectrumEntry] | None = None) -> PreparedEnsemble:
    """Build the per-class ensemble for one preparation mode.

    ``spectrum`` may be passed to reuse a precomputed class list; it must
    belong to the same parameters.
    """
    p = validate_params(p)
    mode = PreparationMode(mode)
    if spectrum is None:
        spectrum = bath_spectrum(p)
    beta = p.beta

    G = np.array([e.G for e in spectrum])
    Omega = np.array([e.Omega for e in spectrum])
    alpha = np.array([e.alpha for e in spectrum])
    log_mult = np.array([e.log_mult for e in spectrum])

    log_weight = log_mult - beta * (0.5 * Omega + alpha)
    xi = G + p.eps

    if mode.is_correlated:
        eps0_n = p.eps0 + G
    else:
        eps0_n = np.full_like(G, p.eps0)
    eta0 = 0.5 * np.hypot(eps0_n, p.delta)

    unit_x = np.column_stack((np.ones_like(G), np.zeros_like(G), np.zeros_like(G)))
    if mode.is_pulse:
        # Pulsed per-class generator (delta/2) sz - (eps0_n/2) sx: thermal
        # trace 2cosh(beta*eta0), normalized Bloch part
        # tanh(beta*eta0)/(2 eta0) * (eps0_n, 0, -delta).
        log_J = _log_2cosh(beta * eta0)
        coef = 0.5 * _tanh_over(eta0, beta)
        b_hat = np.column_stack((coef * eps0_n, np.zeros_like(G), -coef * p.delta))
    elif mode is PreparationMode.PROJECTIVE_CORRELATED:
        # J = <+x| exp(-beta*H0_n) |+x> = cosh(x) - q sinh(x), q = delta/(2 eta0),
        # evaluated as x + log((1-q)/2 + (1+q)/2 e^{-2x}) to survive large x.
        x = beta * eta0
        safe_eta = np.where(eta0 > 0.0, eta0, 1.0)
        q = np.where(eta0 > 0.0, 0.5 * p.delta / safe_eta, 0.0)
        log_J = x + np.log(0.5 * (1.0 - q) + 0.5 * (1.0 + q) * np.exp(-2.0 * x))
        b_hat = unit_x
    else:  # PROJECTIVE_UNCORRELATED
        log_J = np.zeros_like(G)
        b_hat = unit_x

    return PreparedEnsemble(mode=mode, params=p, log_weight=log_weight,
                            log_J=log_J, b_hat=b_hat, xi=xi)


def _scaled_weights(ensemble: PreparedEnsemble) -> tuple[np.ndarray, float]:
    """J-inclusive class weights after a single log-sum-exp shift, plus the
    shifted norm (so r(t) = sum w R b_hat / norm)."""
    log_total = ensemble.log_weight + ensemble.log_J
    shift = float(log_total.max())
    wt = np.exp(log_total - shift)
    norm = float(kahan_sum(wt))
    if not (norm > 0.0):
        raise DomainError("ensemble normalization is not positive")
    return wt, norm


def bloch_trajectory(ensemble: PreparedEnsemble, ts) -> np.ndarray:
    """Reduced Bloch vectors at an array of times; shape (len(ts), 3).

    Evaluates the weighted class sum with Kahan compensation in the fixed
    class order, vectorized over times.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    wt, norm = _scaled_weights(ensemble)
    delta = ensemble.params.delta

    num = np.zeros((ts.size, 3))
    comp = np.zeros_like(num)
    for i in range(ensemble.n_classes):
        xi = ensemble.xi[i]
        b = ensemble.b_hat[i]
        eta = 0.5 * math.hypot(xi, delta)
        if eta == 0.0:
            contrib = np.broadcast_to(b, (ts.size, 3)).copy()
        else:
            mx = delta / (2.0 * eta)
            mz = xi / (2.0 * eta)
            phi = (2.0 * eta) * ts
            c = np.cos(phi)
            s = np.sin(phi)
            mdotr = mx * b[0] + mz * b[2]
            contrib = np.empty((ts.size, 3))
            contrib[:, 0] = c * b[0] + s * (-mz * b[1]) + (1.0 - c) * (mdotr * mx)
            contrib[:, 1] = c * b[1] + s * (mz * b[0] - mx * b[2])
            contrib[:, 2] = c * b[2] + s * (mx * b[1]) + (1.0 - c) * (mdotr * mz)
        contrib *= wt[i]
        y = contrib - comp
        t_acc = num + y
        comp = (t_acc - num) - y
        num = t_acc
    return num / norm


def _point_from_r(t: float, r: np.ndarray) -> DynamicsPoint:
    coherence_sq = float(r[0] * r[0] + r[1] * r[1])
    if coherence_sq < COHERENCE_FLOOR:
        gamma = math.inf
    else:
        gamma = -0.5 * math.log(coherence_sq)
    phase = math.atan2(r[1], r[0])
    if phase <= -math.pi:
        phase = math.pi
    return DynamicsPoint(t=float(t), r=r, Gamma=gamma, phase=phase)


def reduced_bloch(ensemble: PreparedEnsemble, t: float) -> DynamicsPoint:
    """Reduced probe state at a single time."""
    if t < 0:
        raise ParameterError(f"t must be non-negative, got {t}")
    r = bloch_trajectory(ensemble, [t])[0]
    return _point_from_r(t, r)


def dynamics_points(ensemble: PreparedEnsemble, ts) -> list[DynamicsPoint]:
    rs = bloch_trajectory(ensemble, ts)
    return [_point_from_r(t, r) for t, r in zip(np.atleast_1d(ts), rs)]


# -- propagator surface ------------------------------------------------------

def _class_rotation_matrices(xi: np.ndarray, delta: float, t: float,
                             corrected: bool) -> np.ndarray:
    """Stack of per-class 3x3 Bloch rotations; shape (n, 3, 3).

    ``corrected=False`` replaces the xx entry by the variant with eta^2
    instead of xi^2 inside the cosine term; that variant violates the t = 0
    identity and is retained only as a diagnostic surface.
    """
    eta = 0.5 * np.hypot(xi, delta)
    safe = np.where(eta > 0.0, eta, 1.0)
    mx = np.where(eta > 0.0, delta / (2.0 * safe), 0.0)
    mz = np.where(eta > 0.0, xi / (2.0 * safe), 0.0)
    phi = 2.0 * eta * t
    c = np.cos(phi)
    s = np.sin(phi)
    oc = 1.0 - c
    n = xi.size
    mats = np.zeros((n, 3, 3))
    mats[:, 0, 0] = c + oc * mx * mx
    mats[:, 0, 1] = -s * mz
    mats[:, 0, 2] = oc * mx * mz
    mats[:, 1, 0] = s * mz
    mats[:, 1, 1] = c
    mats[:, 1, 2] = -s * mx
    mats[:, 2, 0] = oc * mx * mz
    mats[:, 2, 1] = s * mx
    mats[:, 2, 2] = c + oc * mz * mz
    mats[eta == 0.0] = np.eye(3)
    if not corrected:
        with np.errstate(divide="ignore", invalid="ignore"):
            alt = np.where(eta > 0.0,
                           (delta ** 2 + eta ** 2 * np.cos(2.0 * eta * t)) / (4.0 * safe ** 2),
                           1.0)
        mats[:, 0, 0] = alt
    return mats


def _weighted_propagator(xi: np.ndarray, delta: float, log_w: np.ndarray,
                         t: float, corrected: bool) -> np.ndarray:
    shift = float(log_w.max())
    wt = np.exp(log_w - shift)
    mats = _class_rotation_matrices(xi, delta, t, corrected)
    num = kahan_sum(wt[i] * mats[i] for i in range(xi.size))
    den = kahan_sum(wt)
    return num / den


def ensemble_propagator(ensemble: PreparedEnsemble, t: float,
                        corrected: bool = True) -> np.ndarray:
    """J-weighted average rotation sum_n w_n J_n R_n(t) / sum_n w_n J_n.

    For ensembles whose per-class Bloch vectors share one direction and scale
    with J (both projective modes and the uncorrelated pulse), applying this
    matrix to r(0) reproduces :func:`bloch_trajectory` exactly.  For
    PulseCorrelated the per-class vectors differ in direction and no single
    3x3 matrix generates the dynamics; the class sum is then authoritative.
    """
    log_w = ensemble.log_weight + ensemble.log_J
    return _weighted_propagator(ensemble.xi, ensemble.params.delta, log_w, t, corrected)


def averaged_propagator(p: ModelParams, t: float,
                        spectrum: list[SpectrumEntry] | None = None, *,
                        weighting: str = "uncorrelated",
                        corrected: bool = True,
                        jcorr_convention: str = "pre_switch") -> np.ndarray:
    """Ensemble-averaged Bloch propagator matrix.

    ``weighting="uncorrelated"`` averages the per-class rotations with plain
    bath Boltzmann weights; ``"correlated"`` additionally weights each class
    by its thermal trace factor 2 cosh(beta*eta).  ``jcorr_convention``
    selects the level spacing inside that factor: "pre_switch" (default)
    builds eta from eps0, consistent with the joint partition function of the
    prepared state; "post_switch" evaluates the printed alternative built
    from eps.
    """
    p = validate_params(p)
    if spectrum is None:
        spectrum = bath_spectrum(p)
    if weighting not in ("uncorrelated", "correlated"):
        raise ParameterError(f"unknown weighting {weighting!r}")
    if jcorr_convention not in ("pre_switch", "post_switch"):
        raise ParameterError(f"unknown jcorr convention {jcorr_convention!r}")

    G = np.array([e.G for e in spectrum])
    Omega = np.array([e.Omega for e in spectrum])
    alpha = np.array([e.alpha for e in spectrum])
    log_mult = np.array([e.log_mult for e in spectrum])
    beta = p.beta
    log_w = log_mult - beta * (0.5 * Omega + alpha)
    xi = G + p.eps
    if weighting == "correlated":
        spacing = p.eps0 if jcorr_convention == "pre_switch" else p.eps
        eta = 0.5 * np.hypot(spacing + G, p.delta)
        log_w = log_w + _log_2cosh(beta * eta)
    return _weighted_propagator(xi, p.delta, log_w, t, corrected)


# -- CSV output --------------------------------------------------------------

def trajectory_to_csv(points: list[DynamicsPoint], path: str, p: ModelParams,
                      mode: PreparationMode,
                      header_lines: tuple[str, ...] = ()) -> None:
    """Trajectory CSV: t, nx, ny, nz, Gamma, phase, mode."""
    rows = [(pt.t, pt.r[0], pt.r[1], pt.r[2], pt.Gamma, pt.phase, mode.value)
            for pt in points]
    lines = list(header_lines) or ["reduced dynamics trajectory", params_echo(p)]
    write_csv_atomic(path, ("t", "nx", "ny", "nz", "Gamma", "phase", "mode"),
                     rows, header_lines=lines)
