"""Quantum Fisher information of the reduced probe state.

Three routes compute F for an estimator x in {T, g}:

* ``bloch`` (default): F = |dr|^2 + (r.dr)^2/(1 - |r|^2) from the Bloch
  vector and its parameter derivative; exact for any mixed qubit state.
* ``eigen``: the spectral form F = sum_n (p_n')^2/p_n
  + 2 sum_{n != m} |<v_n|drho|v_m>|^2/(p_n + p_m) from a closed-form 2x2
  eigendecomposition.  Provably identical to the Bloch route; kept as an
  independent implementation for cross-checking.
* ``closed_form``: the (Gamma, Omega, nz)-coordinate expression used for the
  dephasing-style analyses; valid for strictly mixed states.

Parameter derivatives are central finite differences with one Richardson
extrapolation level; the spectrum and ensemble are rebuilt at each shifted
parameter value because both the Boltzmann weights and the rotation
frequencies depend on the estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .dynamics import PreparationMode, bloch_trajectory, prepare
from .model import (PAULI, DomainError, ModelParams, bloch_to_density,
                    params_echo, validate_params)
from .util import write_csv_atomic

DEFAULT_REL_STEP = 1e-5
MIN_ABS_STEP = 1e-12
NEGATIVE_F_TOLERANCE = 1e-9


class Estimator(str, Enum):
    TEMPERATURE = "Temperature"
    COUPLING = "Coupling"

    @property
    def param_name(self) -> str:
        return "T" if self is Estimator.TEMPERATURE else "g"


class QfiRoute(str, Enum):
    EIGEN = "eigen"
    BLOCH = "bloch"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class QfiRecord:
    """One (time, estimator value) Fisher-information sample.

    deriv_step is the relative finite-difference step actually used;
    step_check, when present, is the relative change of F under a halved
    step (populated only by ``verify_step=True`` evaluations).
    """

    t: float
    x_name: str
    x: float
    F: float
    mode: PreparationMode
    route: QfiRoute
    deriv_step: float
    step_check: float | None = None


# -- the three routes ---------------------------------------------------------

def qfi_bloch(r, dr) -> float:
    """F = |dr|^2 + (r.dr)^2 / (1 - |r|^2) for a qubit Bloch pair.

    At a pure state (|r| = 1) only tangential derivatives are admissible:
    if the radial component r.dr is negligible the formula reduces to
    |dr|^2, otherwise the state family leaves the Bloch ball and a
    :class:`DomainError` is raised.
    """
    r = np.asarray(r, dtype=float)
    dr = np.asarray(dr, dtype=float)
    n2 = float(np.dot(r, r))
    if n2 > 1.0 + 1e-9:
        raise DomainError(f"Bloch norm exceeds 1: |r|^2 = {n2}")
    dd = float(np.dot(dr, dr))
    radial = float(np.dot(r, dr))
    gap = 1.0 - n2
    if gap < 1e-12:
        if abs(radial) < 1e-9:
            return dd
        raise DomainError(
            f"radial derivative {radial} at a pure state (1 - |r|^2 = {gap})")
    return dd + radial * radial / gap


def _qubit_eigensystem(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form eigenvalues/vectors of (I + r.sigma)/2.

    Returns (eigenvalues (2,), v_plus, v_minus) with v_plus belonging to the
    larger eigenvalue (1 + |r|)/2.  The branch is chosen by the sign of nz to
    avoid cancellation; |r| ~ 0 falls back to the sigma_z basis.
    """
    n = float(np.linalg.norm(r))
    evals = np.array([(1.0 + n) / 2.0, (1.0 - n) / 2.0])
    if n < 1e-15:
        v_plus = np.array([1.0, 0.0], dtype=complex)
        v_minus = np.array([0.0, 1.0], dtype=complex)
        return evals, v_plus, v_minus
    nx, ny, nz = r
    if nz >= 0.0:
        a = n + nz
        v_plus = np.array([a, nx + 1j * ny], dtype=complex)
        v_minus = np.array([-(nx - 1j * ny), a], dtype=complex)
    else:
        b = n - nz
        v_minus = np.array([b, -(nx + 1j * ny)], dtype=complex)
        v_plus = np.array([nx - 1j * ny, b], dtype=complex)
    v_plus = v_plus / np.linalg.norm(v_plus)
    v_minus = v_minus / np.linalg.norm(v_minus)
    return evals, v_plus, v_minus


def qfi_eigen(rho, drho) -> float:
    """Spectral-form QFI of a qubit density matrix and its derivative.

    F = sum_n (p_n')^2 / p_n + 2 sum_{n != m} |<v_n|drho|v_m>|^2 / (p_n + p_m)
    with p_n' = <v_n|drho|v_n>.  Eigenvalues below 1e-14 are dropped from the
    classical part when their derivative also vanishes (|p'| < 1e-12);
    otherwise F is unbounded and a :class:`DomainError` is raised.  The
    near-degenerate gap needs no special casing: the off-diagonal weight is
    |<v_m|drho|v_n>|^2/(p_n + p_m), finite for any gap.
    """
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise DomainError("rho is not Hermitian")
    if np.max(np.abs(drho - drho.conj().T)) > 1e-10:
        raise DomainError("drho is not Hermitian")
    if abs(np.trace(drho)) > 1e-10:
        raise DomainError(f"drho trace {np.trace(drho)} is not zero")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise DomainError("rho trace is not 1")

    r = np.array([np.trace(rho @ s).real for s in PAULI])
    norm = float(np.linalg.norm(r))
    if norm > 1.0:
        r = r / norm * min(norm, 1.0)  # shave float overshoot only
        if norm > 1.0 + 1e-9:
            raise DomainError(f"unphysical rho: |r| = {norm}")
    evals, v_plus, v_minus = _qubit_eigensystem(r)
    vecs = (v_plus, v_minus)

    total = 0.0
    for i in range(2):
        di = float((vecs[i].conj() @ drho @ vecs[i]).real)
        if evals[i] < 1e-14:
            if abs(di) < 1e-12:
                continue
            raise DomainError(
                f"vanishing eigenvalue with non-vanishing derivative ({di}): F unbounded")
        total += di * di / evals[i]
    off = vecs[0].conj() @ drho @ vecs[1]
    total += 4.0 * float(abs(off)) ** 2 / float(evals[0] + evals[1])
    return total


def qfi_closed_form(Gamma: float, dGamma: float, nz: float, dnz: float,
                    dphase: float) -> float:
    """QFI in decoherence coordinates (Gamma, phase, nz) and their derivatives.

    F = (Gamma' - nz nz' e^{2 Gamma})^2 / (f (e^{2 Gamma} - f))
        + (nz' + nz Gamma')^2 / f + (phase')^2 e^{-2 Gamma},
    f = 1 + nz^2 e^{2 Gamma}.  Requires e^{2 Gamma} > f, i.e. a strictly
    mixed state; at nz = nz' = 0 this reduces to the pure-dephasing form
    (Gamma')^2/(e^{2 Gamma} - 1) + (phase')^2 e^{-2 Gamma}.
    """
    for name, v in (("Gamma", Gamma), ("dGamma", dGamma), ("nz", nz),
                    ("dnz", dnz), ("dphase", dphase)):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v}")
    e2g = math.exp(2.0 * Gamma)
    f = 1.0 + nz * nz * e2g
    gap = e2g - f
    if gap <= 0.0:
        raise DomainError(
            f"closed form needs e^(2 Gamma) > 1 + nz^2 e^(2 Gamma); gap = {gap}")
    term1 = (dGamma - nz * dnz * e2g) ** 2 / (f * gap)
    term2 = (dnz + nz * dGamma) ** 2 / f
    term3 = dphase * dphase / e2g
    return term1 + term2 + term3


def decoherence_coordinates(r, dr) -> tuple[float, float, float, float, float, float]:
    """(Gamma, dGamma, nz, dnz, phase, dphase) from a Bloch pair.

    Needs nx^2 + ny^2 > 0; used to feed :func:`qfi_closed_form`.
    """
    nx, ny, nz = (float(v) for v in r)
    dnx, dny, dnz = (float(v) for v in dr)
    c2 = nx * nx + ny * ny
    if c2 <= 0.0:
        raise DomainError("vanishing coherence: Gamma/phase derivatives undefined")
    gamma = -0.5 * math.log(c2)
    dgamma = -(nx * dnx + ny * dny) / c2
    phase = math.atan2(ny, nx)
    dphase = (nx * dny - ny * dnx) / c2
    return gamma, dgamma, nz, dnz, phase, dphase


# -- finite-difference derivatives --------------------------------------------

def _with_estimator(p: ModelParams, which: Estimator, value: float) -> ModelParams:
    if which is Estimator.TEMPERATURE:
        return replace(p, T=value)
    return replace(p, g=value)


def _choose_step(x0: float, which: Estimator, rel_step: float) -> float:
    scale = max(abs(x0), 1e-3)
    h = rel_step * scale
    if which is Estimator.TEMPERATURE:
        # central stencil must keep T - h > 0
        h = min(h, 0.5 * x0)
    if h < MIN_ABS_STEP:
        raise DomainError(
            f"finite-difference step shrank below {MIN_ABS_STEP} at x = {x0}")
    return h


def derivative_trajectory(p: ModelParams, mode, ts, which,
                          rel_step: float = DEFAULT_REL_STEP) -> tuple[np.ndarray, float]:
    """d r(t) / d x over an array of times; returns (dr array, step used).

    Richardson-extrapolated central differences: D(h) and D(h/2) combine to
    (4 D(h/2) - D(h)) / 3.  The spectrum and ensemble are rebuilt at the four
    shifted parameter values.
    """
    p = validate_params(p)
    which = Estimator(which)
    mode = PreparationMode(mode)
    x0 = p.T if which is Estimator.TEMPERATURE else p.g
    h = _choose_step(x0, which, rel_step)

    def traj(x: float) -> np.ndarray:
        return bloch_trajectory(prepare(_with_estimator(p, which, x), mode), ts)

    d_full = (traj(x0 + h) - traj(x0 - h)) / (2.0 * h)
    d_half = (traj(x0 + 0.5 * h) - traj(x0 - 0.5 * h)) / h
    dr = (4.0 * d_half - d_full) / 3.0
    return dr, h


def bloch_derivative(p: ModelParams, mode, t: float, which,
                     rel_step: float = DEFAULT_REL_STEP) -> np.ndarray:
    """d r / d x at a single time (Richardson-extrapolated central FD)."""
    dr, _ = derivative_trajectory(p, mode, [t], which, rel_step=rel_step)
    return dr[0]


def _route_value(route: QfiRoute, r: np.ndarray, dr: np.ndarray) -> float:
    if route is QfiRoute.BLOCH:
        f = qfi_bloch(r, dr)
    elif route is QfiRoute.EIGEN:
        rho = bloch_to_density(r)
        drho = 0.5 * (dr[0] * PAULI[0] + dr[1] * PAULI[1] + dr[2] * PAULI[2])
        f = qfi_eigen(rho, drho)
    else:
        gamma, dgamma, nz, dnz, _, dphase = decoherence_coordinates(r, dr)
        f = qfi_closed_form(gamma, dgamma, nz, dnz, dphase)
    if f < -NEGATIVE_F_TOLERANCE:
        raise DomainError(f"negative Fisher information {f}")
    return max(f, 0.0)


def qfi_trace(p: ModelParams, mode, ts, which, route=QfiRoute.BLOCH,
              rel_step: float = DEFAULT_REL_STEP,
              verify_step: bool = False) -> list[QfiRecord]:
    """Fisher information over an array of times (shared ensemble rebuilds).

    ``verify_step=True`` additionally evaluates every record at half the
    step and stores the relative change in ``step_check``.
    """
    p = validate_params(p)
    which = Estimator(which)
    mode = PreparationMode(mode)
    route = QfiRoute(route)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))

    r = bloch_trajectory(prepare(p, mode), ts)
    dr, h = derivative_trajectory(p, mode, ts, which, rel_step=rel_step)
    x0 = p.T if which is Estimator.TEMPERATURE else p.g
    rel_used = h / max(abs(x0), 1e-3)
    values = [_route_value(route, r[i], dr[i]) for i in range(ts.size)]

    checks: list[float | None] = [None] * ts.size
    if verify_step:
        dr2, _ = derivative_trajectory(p, mode, ts, which, rel_step=rel_step / 2.0)
        for i in range(ts.size):
            f2 = _route_value(route, r[i], dr2[i])
            scale = max(abs(values[i]), abs(f2), 1e-300)
            checks[i] = abs(f2 - values[i]) / scale

    return [QfiRecord(t=float(ts[i]), x_name=which.param_name, x=float(x0),
                      F=values[i], mode=mode, route=route,
                      deriv_step=rel_used, step_check=checks[i])
            for i in range(ts.size)]


def qfi_at(p: ModelParams, mode, t: float, which, route=QfiRoute.BLOCH,
           rel_step: float = DEFAULT_REL_STEP, verify_step: bool = False) -> QfiRecord:
    """Single-time Fisher information record (compose dynamics + derivative)."""
    return qfi_trace(p, mode, [t], which, route=route, rel_step=rel_step,
                     verify_step=verify_step)[0]


def qfi_function(p: ModelParams, mode, which, route=QfiRoute.BLOCH,
                 rel_step: float = DEFAULT_REL_STEP):
    """Return F(ts) as a callable reusing one set of prepared ensembles.

    The five ensembles (center and four parameter shifts) do not depend on
    time, so optimizers can call the closure at arbitrary t cheaply.
    """
    p = validate_params(p)
    which = Estimator(which)
    mode = PreparationMode(mode)
    route = QfiRoute(route)
    x0 = p.T if which is Estimator.TEMPERATURE else p.g
    h = _choose_step(x0, which, rel_step)

    ens_center = prepare(p, mode)
    shifted = {dx: prepare(_with_estimator(p, which, x0 + dx), mode)
               for dx in (h, -h, 0.5 * h, -0.5 * h)}

    def evaluate(ts) -> np.ndarray:
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        r = bloch_trajectory(ens_center, ts_arr)
        d_full = (bloch_trajectory(shifted[h], ts_arr)
                  - bloch_trajectory(shifted[-h], ts_arr)) / (2.0 * h)
        d_half = (bloch_trajectory(shifted[0.5 * h], ts_arr)
                  - bloch_trajectory(shifted[-0.5 * h], ts_arr)) / h
        dr = (4.0 * d_half - d_full) / 3.0
        return np.array([_route_value(route, r[i], dr[i]) for i in range(ts_arr.size)])

    return evaluate


def route_comparison(p: ModelParams, mode, t: float, which,
                     rel_step: float = DEFAULT_REL_STEP) -> dict:
    """Evaluate all three routes at one point and report their deviations.

    The closed-form entry is None (with the reason recorded) where that
    route's domain constraint fails.  Deviations are relative to the eigen
    value; this is a report, not an assertion.
    """
    p = validate_params(p)
    r = bloch_trajectory(prepare(p, mode), [t])[0]
    dr = bloch_derivative(p, mode, t, which, rel_step=rel_step)
    out: dict = {"t": t, "nz": float(r[2])}
    f_bloch = _route_value(QfiRoute.BLOCH, r, dr)
    f_eigen = _route_value(QfiRoute.EIGEN, r, dr)
    out["bloch"] = f_bloch
    out["eigen"] = f_eigen
    scale = max(abs(f_eigen), 1e-300)
    out["bloch_vs_eigen"] = abs(f_bloch - f_eigen) / scale
    try:
        f_closed = _route_value(QfiRoute.CLOSED_FORM, r, dr)
        out["closed_form"] = f_closed
        out["closed_vs_eigen"] = abs(f_closed - f_eigen) / scale
    except DomainError as exc:
        out["closed_form"] = None
        out["closed_form_error"] = str(exc)
    return out


def records_to_csv(records: list[QfiRecord], path: str, p: ModelParams,
                   header_lines: tuple[str, ...] = ()) -> None:
    """QFI CSV: t, x_name, x_value, F, mode, route, deriv_step."""
    rows = [(rec.t, rec.x_name, rec.x, rec.F, rec.mode.value, rec.route.value,
             rec.deriv_step) for rec in records]
    lines = list(header_lines) or ["quantum Fisher information records",
                                   params_echo(p)]
    write_csv_atomic(path, ("t", "x_name", "x_value", "F", "mode", "route", "deriv_step"),
                     rows, header_lines=lines)
