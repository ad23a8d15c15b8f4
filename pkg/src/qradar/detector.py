"""Truncated four-outcome photocounting and the effective photon number nu.

Counting is truncated at two photons, so a readout sorts each attempt into
the classes {0, 1, >=2}. Two sequential qubit checks report one of the four
outcomes (gg, ge, eg, ee); a confusion matrix maps true classes to outcome
probabilities. Each outcome m carries a tunable effective photon number
nu_m, and the detection statistic is the sample mean of nu.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

OUTCOMES = ("gg", "ge", "eg", "ee")

# nu values used when no tuning is performed, ordered like OUTCOMES
DEFAULT_NU = np.array([2.0, 1.0, 1.0, 0.0])

# ideal mapping: 0 photons -> ee, 1 -> ge, >=2 -> gg, eg never occurs
_IDEAL_CONFUSION = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class PhotocountModel:
    """Outcome probabilities conditioned on the true photon class."""

    confusion: np.ndarray = field(default_factory=lambda: _IDEAL_CONFUSION.copy())

    def __post_init__(self):
        c = np.asarray(self.confusion, dtype=float)
        if c.shape != (3, 4):
            raise ValueError("confusion matrix must be 3x4 (classes x outcomes)")
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise ValueError("confusion entries must lie in [0, 1]")
        if np.max(np.abs(c.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("confusion rows must each sum to 1")
        object.__setattr__(self, "confusion", c)

    @classmethod
    def ideal(cls) -> "PhotocountModel":
        return cls()

    @classmethod
    def with_errors(cls, eps_pi: float = 0.0, eps_ro: float = 0.0) -> "PhotocountModel":
        """Ideal mapping degraded by pulse-selectivity and readout errors.

        The two error knobs combine into a single flip probability
        eps = 1 - (1-eps_pi)(1-eps_ro) per attempt, spread uniformly over
        the three wrong outcomes.
        """
        if not (0.0 <= eps_pi <= 1.0 and 0.0 <= eps_ro <= 1.0):
            raise ValueError("error rates must lie in [0, 1]")
        eps = 1.0 - (1.0 - eps_pi) * (1.0 - eps_ro)
        conf = _IDEAL_CONFUSION * (1.0 - eps) + (1.0 - _IDEAL_CONFUSION) * eps / 3.0
        return cls(confusion=conf)


def thermal_class_probs(mu: float) -> np.ndarray:
    """Probabilities of the photon classes {0, 1, >=2} for a thermal state."""
    if mu < 0.0:
        raise ValueError("mu must be >= 0")
    p0 = 1.0 / (mu + 1.0)
    p1 = mu / (mu + 1.0) ** 2
    return np.array([p0, p1, 1.0 - p0 - p1])


def outcome_distribution(mu: float, model: PhotocountModel) -> np.ndarray:
    """Outcome probabilities over (gg, ge, eg, ee) for readout population mu."""
    return thermal_class_probs(mu) @ model.confusion


def _nu_moments(dist: np.ndarray, nu: np.ndarray) -> tuple[float, float]:
    mean = float(dist @ nu)
    var = float(dist @ nu**2) - mean * mean
    return mean, np.sqrt(max(var, 0.0))


def error_exponent_categorical(dist_yes, dist_no, nu) -> float:
    """Central-limit error exponent of the mean-of-nu statistic.

    Returns inf when the two distributions are deterministically separated
    (zero spread on both sides with distinct means).
    """
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (4,) or not np.all(np.isfinite(nu)):
        raise ValueError("nu must be four finite values")
    dist_yes = np.asarray(dist_yes, dtype=float)
    dist_no = np.asarray(dist_no, dtype=float)
    m_yes, s_yes = _nu_moments(dist_yes, nu)
    m_no, s_no = _nu_moments(dist_no, nu)
    if s_yes + s_no == 0.0:
        return 0.0 if m_yes == m_no else np.inf
    return (m_yes - m_no) ** 2 / (2.0 * (s_yes + s_no) ** 2)


def normalize_nu(nu) -> np.ndarray:
    """Affine-normalize nu so that nu_ee = 0 and the largest component is 1."""
    nu = np.asarray(nu, dtype=float)
    w = nu - nu[3]
    hi, lo = w.max(), w.min()
    if hi == 0.0 and lo == 0.0:
        raise ValueError("nu components are all equal")
    scale = hi if hi > 0.0 else lo  # all-negative case flips sign, exponent unchanged
    return w / scale


# restart seeds for the two free components, first entry is the normalized default
_SIMPLEX_SEEDS = ((0.5, 0.5), (0.0, 0.0), (1.0, 1.0), (0.25, 0.75), (0.75, 0.25))


def optimize_nu(dist_yes, dist_no) -> tuple[np.ndarray, float]:
    """Tune the nu assignment to maximize the categorical error exponent.

    Works in charts that pin nu_ee = 0 and one other component to 1, and
    runs a simplex descent over the remaining two components from several
    deterministic restarts. Ties keep the earliest restart. The returned
    assignment is affine-normalized.
    """
    dist_yes = np.asarray(dist_yes, dtype=float)
    dist_no = np.asarray(dist_no, dtype=float)
    if np.allclose(dist_yes, dist_no, rtol=0.0, atol=1e-15):
        warnings.warn("distributions identical: exponent is flat in nu", RuntimeWarning)
        return normalize_nu(DEFAULT_NU), 0.0

    best_e = error_exponent_categorical(dist_yes, dist_no, DEFAULT_NU)
    best_nu = DEFAULT_NU.copy()
    for pinned in range(3):
        free = [i for i in range(3) if i != pinned]

        def objective(x):
            nu = np.zeros(4)
            nu[pinned] = 1.0
            nu[free[0]], nu[free[1]] = x
            e = error_exponent_categorical(dist_yes, dist_no, nu)
            return -e if np.isfinite(e) else -1e300

        for seed in _SIMPLEX_SEEDS:
            res = minimize(
                objective,
                np.asarray(seed, dtype=float),
                method="Nelder-Mead",
                options=dict(xatol=1e-10, fatol=1e-14, maxiter=2000),
            )
            if -res.fun > best_e * (1.0 + 1e-12):
                nu = np.zeros(4)
                nu[pinned] = 1.0
                nu[free[0]], nu[free[1]] = res.x
                best_e, best_nu = -res.fun, nu
    return normalize_nu(best_nu), best_e
