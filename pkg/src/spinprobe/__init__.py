"""spinprobe: exact reduced dynamics and Fisher information for a qubit probe
coupled to a finite spin bath.

The package computes the reduced state of a two-level probe interacting with
n bath spins through sigma_z (x) sigma_z couplings, for four thermal initial
state preparations (unitary pulse or projective measurement, with or without
the probe-bath correlations of the joint Gibbs state), and quantifies how
precisely the bath temperature or the probe-bath coupling can be estimated
via the quantum Fisher information.  A dense full-Hilbert-space oracle
(n <= 8) cross-checks every analytic path.
"""

from .dynamics import (ALL_MODES, DynamicsPoint, PreparationMode,
                       PreparedEnsemble, averaged_propagator, bloch_trajectory,
                       dynamics_points, ensemble_propagator, prepare,
                       reduced_bloch, trajectory_to_csv)
from .estimation import (ComparisonResult, OptimumRecord, SweepSpec,
                         compare_preparations, golden_section_maximize,
                         optimize_time, sweep_parameter)
from .model import (DomainError, ModelParams, ParameterError, QubitExpWeights,
                    bloch_to_density, check_qubit_density, density_to_bloch,
                    qubit_exp_weights, rodrigues_rotate, rotation_matrix,
                    validate_params)
from .oracle import (DenseModel, build_total_hamiltonian, oracle_bloch,
                     oracle_qfi, oracle_reduced_state, prepare_total_state)
from .qfi import (Estimator, QfiRecord, QfiRoute, bloch_derivative, qfi_at,
                  qfi_bloch, qfi_closed_form, qfi_eigen, qfi_function,
                  qfi_trace, route_comparison)
from .spectrum import (SpectrumEntry, bath_spectrum, collapse_uniform,
                       enumerate_exact, spectrum_to_csv, total_multiplicity)

__version__ = "0.1.0"

__all__ = [
    "ALL_MODES", "ComparisonResult", "DenseModel", "DomainError",
    "DynamicsPoint", "Estimator", "ModelParams", "OptimumRecord",
    "ParameterError", "PreparationMode", "PreparedEnsemble", "QfiRecord",
    "QfiRoute", "QubitExpWeights", "SpectrumEntry", "SweepSpec",
    "averaged_propagator", "bath_spectrum", "bloch_derivative",
    "bloch_to_density", "bloch_trajectory", "build_total_hamiltonian",
    "check_qubit_density", "collapse_uniform", "compare_preparations",
    "density_to_bloch", "dynamics_points", "ensemble_propagator",
    "enumerate_exact", "golden_section_maximize", "optimize_time",
    "oracle_bloch", "oracle_qfi", "oracle_reduced_state", "prepare",
    "prepare_total_state", "qfi_at", "qfi_bloch", "qfi_closed_form",
    "qfi_eigen", "qfi_function", "qfi_trace", "qubit_exp_weights",
    "reduced_bloch", "rodrigues_rotate", "rotation_matrix",
    "route_comparison", "spectrum_to_csv", "sweep_parameter",
    "total_multiplicity", "trajectory_to_csv", "validate_params",
]
