"""Propagation of measurement uncertainties into exponents and ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Measured:
    """A value with a one-standard-deviation uncertainty."""

    value: float
    sigma: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")


def delta_ecl(kappa: Measured, n_sig: Measured, n_noise: Measured) -> Measured:
    """Classical bound with its uncertainty from quadrature propagation.

    Cross-correlations between the three calibrations are taken as zero.
    """
    for m in (kappa, n_sig, n_noise):
        if m.value <= 0.0:
            raise ValueError("all inputs must have positive values")
    value = kappa.value * n_sig.value / (4.0 * n_noise.value)
    rel = math.sqrt(
        (kappa.sigma / kappa.value) ** 2
        + (n_sig.sigma / n_sig.value) ** 2
        + (n_noise.sigma / n_noise.value) ** 2
    )
    return Measured(value=value, sigma=value * rel)


def delta_e(
    mean_yes: float,
    sig_yes: float,
    mean_no: float,
    sig_no: float,
    m_trials: float,
    pearson: tuple[float, float, float] = (0.0, 0.0, 1.0),
) -> Measured:
    """Plug-in exponent and a deliberately conservative uncertainty.

    The three Pearson coefficients couple (numerator, denominator),
    (sig_yes, sig_no) inside the numerator term and (sig_yes, sig_no)
    inside the denominator term. The defaults are the worst-case choices:
    independent estimates except full positive correlation between the two
    spreads, which maximizes the bound. With those defaults the expression
    collapses to (1/sqrt(M)) * D^2 * sqrt(1/2 + (sy^2+sn^2)/dmu^2) with
    D = dmu/(sy+sn).
    """
    if m_trials < 2:
        raise ValueError("m_trials must be >= 2")
    if sig_yes <= 0.0 or sig_no <= 0.0:
        raise ValueError("spreads must be > 0")
    dmu = mean_yes - mean_no
    if dmu == 0.0:
        raise ValueError("degenerate case: means are equal")
    r1, r2, r3 = pearson
    e = dmu**2 / (2.0 * (sig_yes + sig_no) ** 2)
    s2 = sig_yes**2 + sig_no**2
    root_m = math.sqrt(m_trials)
    r_num = 2.0 * math.sqrt(max(s2 - 2.0 * r2 * sig_yes * sig_no, 0.0)) / (root_m * abs(dmu))
    r_den = math.sqrt(2.0) * math.sqrt(s2 + 2.0 * r3 * sig_yes * sig_no) / (root_m * (sig_yes + sig_no))
    sigma = e * math.sqrt(max(r_num**2 + r_den**2 - 2.0 * r1 * r_num * r_den, 0.0))
    return Measured(value=e, sigma=sigma)


def delta_q(e: Measured, e_cl: Measured) -> Measured:
    """Advantage ratio with uncertainty, treating the two inputs as independent."""
    if e_cl.value <= 0.0:
        raise ValueError("e_cl must be > 0")
    q = e.value / e_cl.value
    rel_e = e.sigma / e.value if e.value != 0.0 else 0.0
    rel_cl = e_cl.sigma / e_cl.value
    return Measured(value=q, sigma=abs(q) * math.sqrt(rel_e**2 + rel_cl**2))
