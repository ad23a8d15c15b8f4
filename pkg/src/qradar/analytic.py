"""Closed-form detection bounds, receiver performance and optimal gain."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gaussian_core import RadarParams, receiver_means


@dataclass(frozen=True)
class BoundSet:
    e_cl: float    # best classical error exponent
    e_pair: float  # pairwise joint-measurement exponent
    e_max: float   # ultimate joint-measurement exponent
    q_max: float   # e_max / e_cl


def classical_bound(kappa: float, n_sig: float, n_noise: float, exact: bool = False) -> float:
    """Best classical error exponent for a coherent-state probe.

    The canonical form is the high-noise asymptote kappa*n_sig/(4*n_noise).
    With exact=True the full displaced-thermal discrimination exponent
    kappa*n_sig*(sqrt(n_noise+1) - sqrt(n_noise))^2 is returned instead,
    useful for sensitivity checks away from the n_noise >> 1 regime.
    """
    if n_noise <= 0.0:
        raise ValueError("n_noise must be > 0")
    if exact:
        return kappa * n_sig * (math.sqrt(n_noise + 1.0) - math.sqrt(n_noise)) ** 2
    return kappa * n_sig / (4.0 * n_noise)


def quantum_bounds(kappa: float, n_sig: float, n_noise: float) -> BoundSet:
    """Classical, pairwise and ultimate exponents in one record."""
    e_cl = classical_bound(kappa, n_sig, n_noise)
    return BoundSet(
        e_cl=e_cl,
        e_pair=kappa * n_sig / (2.0 * n_noise),
        e_max=kappa * n_sig / n_noise,
        q_max=4.0,
    )


def ideal_error_exponent(params: RadarParams) -> float:
    """Error exponent of an ideal photocounter on the recombined idler.

    Builds the full pipeline for both hypotheses and applies the
    central-limit expression with thermal-state photon variance
    sigma^2 = mu*(mu+1).
    """
    mu_yes, mu_no = receiver_means(params)
    return exponent_from_means(mu_yes, mu_no)


def exponent_from_means(mu_yes: float, mu_no: float) -> float:
    """Central-limit exponent for two thermal readout populations."""
    s_yes = math.sqrt(mu_yes * (mu_yes + 1.0))
    s_no = math.sqrt(mu_no * (mu_no + 1.0))
    if s_yes + s_no == 0.0:
        return 0.0
    return (mu_yes - mu_no) ** 2 / (2.0 * (s_yes + s_no) ** 2)


def optimal_gain(n_sig: float, n_noise: float, kappa: float) -> float:
    """Recombination gain maximizing the ideal exponent, clamped to >= 1."""
    denom = (n_noise + (kappa - 1.0) * n_sig) * (n_noise + (kappa + 1.0) * n_sig + 1.0)
    if denom <= 0.0:
        raise ValueError("gain formula undefined: denominator must be > 0")
    nsp = n_sig * (n_sig + 1.0)
    num = math.sqrt(nsp * (n_noise + kappa * n_sig) * (n_noise + kappa * n_sig + 1.0)) + nsp
    return max(1.0, 1.0 + num / denom)


def advantage(e_quantum: float, e_cl: float) -> float:
    """Ratio of a measured exponent to the classical optimum."""
    if e_cl <= 0.0:
        raise ValueError("e_cl must be > 0")
    return e_quantum / e_cl
