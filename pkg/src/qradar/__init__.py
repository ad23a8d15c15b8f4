"""Numerical toolkit for entanglement-assisted microwave target detection.

Covers probe-state bookkeeping through a lossy, noisy channel, a gain
recombination receiver read out by truncated photon counting, analytic and
Monte Carlo error exponents, classical benchmarks, calibration fits, and
error propagation for the measured advantage.
"""

from .analytic import (
    BoundSet,
    advantage,
    classical_bound,
    exponent_from_means,
    ideal_error_exponent,
    optimal_gain,
    quantum_bounds,
)
from .detector import (
    DEFAULT_NU,
    OUTCOMES,
    PhotocountModel,
    error_exponent_categorical,
    normalize_nu,
    optimize_nu,
    outcome_distribution,
    thermal_class_probs,
)
from .fitkit import (
    FitError,
    FitResult,
    RamseyModel,
    RelaxationModel,
    estimate_kappa,
    fit_interference,
    fit_ramsey,
    fit_relaxation,
    kappa_from_wigner,
    kappa_with_uncertainty,
    lsq_fit,
    ramsey_signal,
    relaxation_signal,
)
from .gaussian_core import (
    RadarParams,
    TwoModeState,
    covariance_matrix,
    gain_for_signal,
    idler_decay,
    mode_overlap,
    propagate_pair,
    receiver_means,
    recombine_mean_photons,
    target_channel,
    tmsv_generate,
)
from .montecarlo import (
    TrialConfig,
    TrialTally,
    error_probability_scaling,
    estimate_error_exponent,
    fit_scaling_slope,
    run_trials,
    sample_thermal,
)
from .uncertainty import Measured, delta_e, delta_ecl, delta_q

__version__ = "0.1.0"

__all__ = [
    "BoundSet",
    "DEFAULT_NU",
    "FitError",
    "FitResult",
    "Measured",
    "OUTCOMES",
    "PhotocountModel",
    "RadarParams",
    "RamseyModel",
    "RelaxationModel",
    "TrialConfig",
    "TrialTally",
    "TwoModeState",
    "advantage",
    "classical_bound",
    "covariance_matrix",
    "delta_e",
    "delta_ecl",
    "delta_q",
    "error_exponent_categorical",
    "error_probability_scaling",
    "estimate_error_exponent",
    "estimate_kappa",
    "exponent_from_means",
    "fit_interference",
    "fit_ramsey",
    "fit_relaxation",
    "fit_scaling_slope",
    "gain_for_signal",
    "ideal_error_exponent",
    "idler_decay",
    "kappa_from_wigner",
    "kappa_with_uncertainty",
    "lsq_fit",
    "mode_overlap",
    "normalize_nu",
    "optimal_gain",
    "optimize_nu",
    "outcome_distribution",
    "propagate_pair",
    "quantum_bounds",
    "ramsey_signal",
    "receiver_means",
    "recombine_mean_photons",
    "relaxation_signal",
    "run_trials",
    "sample_thermal",
    "target_channel",
    "thermal_class_probs",
    "tmsv_generate",
]
