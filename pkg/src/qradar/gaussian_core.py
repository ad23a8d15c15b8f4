"""Zero-mean two-mode Gaussian states and the radar transformation chain.

The probe is a two-mode squeezed state shared between a signal mode that
travels through the noisy target region and an idler mode held in a local
memory. All downstream quantities depend only on second moments, so states
carry the mean photon triple (n_sig, n_idl, n_corr) instead of a full
covariance matrix. A 4x4 matrix view is available for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class RadarParams:
    """Physical parameters of one radar configuration."""

    g0: float = 1.0353          # squeezer gain, sets probe brightness
    nth_s: float = 0.0          # signal-mode thermal population before squeezing
    nth_i: float = 0.0          # idler-mode thermal population after cooling
    kappa_yes: float = 3.02e-2  # target reflectivity when present
    kappa_no: float = 0.0       # residual reflectivity when absent
    n_noise: float = 10.8       # bright background injected on the signal path
    g_rx: float = 1.015         # recombination gain of the receiver
    delta_phi: float = 0.0      # pump phase offset at recombination
    eta_idler: float = 1.0      # idler storage transmissivity over the delay

    def __post_init__(self):
        if self.g0 < 1.0 or self.g_rx < 1.0:
            raise ValueError("parametric gains must be >= 1")
        for name in ("nth_s", "nth_i", "n_noise"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("kappa_yes", "kappa_no", "eta_idler"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.kappa_no > self.kappa_yes:
            raise ValueError("kappa_no must not exceed kappa_yes")


@dataclass(frozen=True)
class TwoModeState:
    """Second moments of a zero-mean signal/idler Gaussian state.

    n_bg tracks background photons already folded into n_sig, which is
    only bookkeeping for reports and never feeds back into the dynamics.
    """

    n_sig: float
    n_idl: float
    n_corr: float
    n_bg: float = 0.0

    def __post_init__(self):
        if min(self.n_sig, self.n_idl, self.n_corr) < 0.0:
            raise ValueError("photon numbers and correlation must be >= 0")
        # positivity proxy; equality holds exactly for pure states
        bound = (self.n_sig + 1.0) * (self.n_idl + 1.0)
        if self.n_corr**2 > bound * (1.0 + 1e-12):
            raise ValueError("unphysical correlation: n_corr^2 exceeds (n_sig+1)(n_idl+1)")


def tmsv_generate(g0: float, nth_s: float = 0.0, nth_i: float = 0.0) -> TwoModeState:
    """Two-mode squeeze of gain g0 acting on thermal seeds.

    With cold seeds (nth = 0) the output is the pure two-mode squeezed
    vacuum with n_sig = n_idl = g0 - 1.
    """
    if g0 < 1.0:
        raise ValueError("squeezer gain must be >= 1")
    if nth_s < 0.0 or nth_i < 0.0:
        raise ValueError("thermal populations must be >= 0")
    n_sig = g0 * nth_s + (g0 - 1.0) * (nth_i + 1.0)
    n_idl = (g0 - 1.0) * (nth_s + 1.0) + g0 * nth_i
    n_corr = math.sqrt(g0 * (g0 - 1.0)) * (1.0 + nth_s + nth_i)
    return TwoModeState(n_sig=n_sig, n_idl=n_idl, n_corr=n_corr)


def target_channel(state: TwoModeState, kappa: float, n_noise: float) -> TwoModeState:
    """Reflection off the target region with reflectivity kappa.

    The returned signal mixes the attenuated probe with n_noise background
    photons; correlations with the idler shrink by sqrt(kappa).
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    if n_noise < 0.0:
        raise ValueError("n_noise must be >= 0")
    return TwoModeState(
        n_sig=kappa * state.n_sig + n_noise,
        n_idl=state.n_idl,
        n_corr=math.sqrt(kappa) * state.n_corr,
        n_bg=n_noise,
    )


def idler_decay(state: TwoModeState, eta: float, nth_bath: float | None = None) -> TwoModeState:
    """Storage decoherence of the idler over the memory delay.

    The correlation always decays by sqrt(eta). The population relaxes
    toward nth_bath; when nth_bath is omitted the memory is taken as
    population-stabilized at its current occupation, so only the stored
    correlation degrades. Pass an explicit bath to model full relaxation.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    bath = state.n_idl if nth_bath is None else nth_bath
    if bath < 0.0:
        raise ValueError("nth_bath must be >= 0")
    return replace(
        state,
        n_idl=eta * state.n_idl + (1.0 - eta) * bath,
        n_corr=math.sqrt(eta) * state.n_corr,
    )


def recombine_mean_photons(state: TwoModeState, g_rx: float, delta_phi: float = 0.0) -> float:
    """Mean photon number read out of the idler after the recombination squeeze.

    Only the correlation term is phase sensitive; delta_phi = 0 gives the
    oscillation maximum.
    """
    if g_rx < 1.0:
        raise ValueError("recombination gain must be >= 1")
    cross = 2.0 * math.sqrt(g_rx * (g_rx - 1.0)) * state.n_corr * math.cos(delta_phi)
    mu = g_rx * state.n_idl + (g_rx - 1.0) * (1.0 + state.n_sig) + cross
    return mu


def propagate_pair(params: RadarParams) -> tuple[TwoModeState, TwoModeState]:
    """Run generation, target channel and idler decay for both hypotheses."""
    probe = tmsv_generate(params.g0, params.nth_s, params.nth_i)
    out = []
    for kappa in (params.kappa_yes, params.kappa_no):
        st = target_channel(probe, kappa, params.n_noise)
        st = idler_decay(st, params.eta_idler)
        out.append(st)
    return out[0], out[1]


def receiver_means(params: RadarParams) -> tuple[float, float]:
    """Mean readout photon numbers (mu_yes, mu_no) for the two hypotheses."""
    st_yes, st_no = propagate_pair(params)
    mu_yes = recombine_mean_photons(st_yes, params.g_rx, params.delta_phi)
    mu_no = recombine_mean_photons(st_no, params.g_rx, params.delta_phi)
    return mu_yes, mu_no


def mode_overlap(offset: float, tau: float) -> float:
    """Overlap of two identical sech envelopes displaced by offset.

    Normalized to 1 at zero offset; used as a scalar multiplier on n_corr
    when the memory delay misses the round-trip time.
    """
    if tau <= 0.0:
        raise ValueError("envelope width must be > 0")
    x = abs(offset) / tau
    if x < 1e-12:
        return 1.0
    if x > 700.0:  # sinh overflows; the overlap is already far below epsilon
        return 0.0
    return x / math.sinh(x)


def apply_overlap(state: TwoModeState, overlap: float) -> TwoModeState:
    """Scale the stored correlation by a mode-overlap factor in [0, 1]."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    return replace(state, n_corr=overlap * state.n_corr)


def gain_for_signal(n_sig: float, nth_s: float = 0.0, nth_i: float = 0.0) -> float:
    """Squeezer gain that produces a requested signal brightness.

    Inverts the generation formula; the result drops below 1 when the
    requested n_sig is smaller than the thermal floor nth_s, which no
    physical gain setting can reach.
    """
    return (n_sig + 1.0 + nth_i) / (nth_s + 1.0 + nth_i)


def gain_from_idler_population(n_idl: float, nth_s: float = 0.0, nth_i: float = 0.0) -> float:
    """Squeezer gain inferred from a measured idler population."""
    return (1.0 + n_idl + nth_s) / (1.0 + nth_i + nth_s)


def covariance_matrix(state: TwoModeState) -> np.ndarray:
    """Quadrature covariance matrix (x_s, p_s, x_i, p_i), vacuum = identity."""
    a = 2.0 * state.n_sig + 1.0
    b = 2.0 * state.n_idl + 1.0
    c = 2.0 * state.n_corr
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    )
