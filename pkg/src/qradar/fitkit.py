"""Nonlinear least-squares engine and the four calibration models.

The models cover the idler-population interference fringe (Ramsey style),
the noise-mode relaxation curve, the recombination cosine and the
reflectivity estimate from truncated quasi-distribution grids. Each model
ships with a synthetic-data generator so calibrations can be exercised in
closed loop against known truth values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .uncertainty import Measured


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FitResult:
    params: np.ndarray
    stderr: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int


def lsq_fit(model_fn, t, y, init, sigma=None, tol: float = 1e-9, max_iter: int = 500) -> FitResult:
    """Damped least-squares fit of model_fn(t, params) to y.

    Residuals are whitened by sigma when given. Standard errors come from
    the local quadratic model, scaled by the residual variance. A fit that
    stops on the iteration budget is returned with converged=False rather
    than raised, so the best-so-far parameters stay available.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    init = np.asarray(init, dtype=float)
    if len(t) < len(init):
        raise FitError("need at least as many samples as parameters")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise FitError("samples must be finite")
    if sigma is not None:
        sigma = np.asarray(sigma, dtype=float)
        if np.any(sigma <= 0.0):
            raise FitError("sigma values must be > 0")

    def residuals(p):
        r = model_fn(t, p) - y
        return r / sigma if sigma is not None else r

    res = least_squares(
        residuals,
        init,
        xtol=tol,
        ftol=1e-15,
        gtol=1e-12,
        max_nfev=max_iter * (len(init) + 1),
        method="trf",
    )
    dof = max(len(t) - len(init), 1)
    s2 = 2.0 * res.cost / dof
    jtj = res.jac.T @ res.jac
    try:
        cov = np.linalg.inv(jtj) * s2
    except np.linalg.LinAlgError as exc:
        raise FitError("singular Jacobian: parameters are not identifiable") from exc
    stderr = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return FitResult(
        params=res.x,
        stderr=stderr,
        residual_norm=float(np.linalg.norm(res.fun)),
        converged=bool(res.status > 0),
        iterations=int(res.nfev),
    )


# ---------------------------------------------------------------------------
# idler-population fringe model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RamseyModel:
    chi: float = 2.0 * math.pi * 4.75e6   # dispersive shift, rad/s
    beta: float = 2.0 * math.pi * 70e3    # second-order shift, rad/s
    t2: float = 12e-6                     # coherence time, s
    kmax: int = 30                        # Fock truncation floor

    def __post_init__(self):
        if self.chi <= 0.0 or self.t2 <= 0.0 or self.kmax < 1:
            raise ValueError("chi and t2 must be > 0 and kmax >= 1")


def thermal_weights(n_i: float, kmax: int) -> np.ndarray:
    """Thermal Fock weights n^k/(n+1)^(k+1) for k = 0..kmax."""
    if n_i <= 0.0:
        w = np.zeros(kmax + 1)
        w[0] = 1.0
        return w
    # log space: the direct ratio overflows for bright modes at large kmax
    k = np.arange(kmax + 1)
    return np.exp(k * (math.log(n_i) - math.log1p(n_i)) - math.log1p(n_i))


def _kmax_for(n_i: float, floor: int, tol: float = 1e-6) -> int:
    if n_i <= 0.0:
        return floor
    ratio = n_i / (n_i + 1.0)
    # smallest k with ratio^(k+1) <= tol
    needed = int(math.ceil(math.log(tol) / math.log(ratio))) - 1
    return max(floor, needed)


def ramsey_signal(t, n_i: float, model: RamseyModel):
    """Qubit fringe amplitude dephased by a thermal idler population.

    Each Fock level k contributes a cosine at chi*k + beta*k^2 weighted by
    the thermal distribution; the sum is truncated once the tail weight
    drops below 1e-6 and rescaled to unit amplitude at t = 0.
    """
    if n_i < 0.0:
        raise ValueError("n_i must be >= 0")
    t = np.asarray(t, dtype=float)
    kmax = _kmax_for(n_i, model.kmax)
    w = thermal_weights(n_i, kmax)
    w = w / w.sum()
    k = np.arange(kmax + 1)
    osc = np.cos(np.outer(t, model.chi * k + model.beta * k**2)) @ w
    return np.exp(-t / model.t2) * osc


def ramsey_ni_init(t, y, model: RamseyModel) -> float:
    """Starting population from the contrast of the first fringe harmonic."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    spec = np.abs(np.fft.rfft(y))
    freqs = np.fft.rfftfreq(len(t), t[1] - t[0])
    f1 = (model.chi + model.beta) / (2.0 * math.pi)
    i1 = int(np.argmin(np.abs(freqs - f1)))
    lo, hi = max(i1 - 3, 1), min(i1 + 4, len(spec))
    contrast = spec[lo:hi].max() / max(spec[0], 1e-12)
    contrast = min(max(contrast, 1e-4), 0.9)
    return contrast / (1.0 - contrast)


def fit_ramsey(t, y, model: RamseyModel, tol: float = 1e-9) -> FitResult:
    """Fit (amplitude, n_i, t2) to fringe data; chi and beta stay fixed."""

    def fn(tt, p):
        a, n_i, t2 = p
        local = RamseyModel(chi=model.chi, beta=model.beta, t2=abs(t2), kmax=model.kmax)
        return a * ramsey_signal(tt, abs(n_i), local)

    init = [float(np.max(np.abs(y))), ramsey_ni_init(t, y, model), 0.8 * float(np.ptp(t))]
    res = lsq_fit(fn, t, y, init, tol=tol)
    fixed = res.params.copy()
    fixed[1:] = np.abs(fixed[1:])
    return FitResult(fixed, res.stderr, res.residual_norm, res.converged, res.iterations)


# ---------------------------------------------------------------------------
# relaxation model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelaxationModel:
    t1: float = 4.1e-6   # relaxation time, s
    nth: float = 0.0     # equilibrium population

    def __post_init__(self):
        if self.t1 <= 0.0:
            raise ValueError("t1 must be > 0")


def relaxation_signal(t, n_init: float, model: RelaxationModel):
    """Ground-state probability while the population decays toward nth."""
    t = np.asarray(t, dtype=float)
    decay = np.exp(-t / model.t1)
    return 1.0 / (n_init * decay + (1.0 - decay) * model.nth + 1.0)


def fit_relaxation(t, y, sigma=None, tol: float = 1e-9) -> FitResult:
    """Fit (n_init, t1, nth) to a relaxation curve."""

    def fn(tt, p):
        return relaxation_signal(tt, abs(p[0]), RelaxationModel(t1=abs(p[1]), nth=abs(p[2])))

    n0 = max(1.0 / max(float(y[0]), 1e-3) - 1.0, 0.5)
    init = [n0, float(np.ptp(t)) / 4.0, 0.05]
    res = lsq_fit(fn, t, y, init, sigma=sigma, tol=tol)
    return FitResult(np.abs(res.params), res.stderr, res.residual_norm, res.converged, res.iterations)


# ---------------------------------------------------------------------------
# interference cosine
# ---------------------------------------------------------------------------

def fit_interference(phases, ratios, tol: float = 1e-9) -> FitResult:
    """Fit offset + amplitude*cos(phi - phi0) with amplitude >= 0.

    Parameters come back as (offset, amplitude, phi0) with phi0 wrapped to
    (-pi, pi]. Flat data is reported with zero amplitude and phi0 = nan.
    """
    phases = np.asarray(phases, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    if np.ptp(phases) <= math.pi:
        raise FitError("phase span too small: need more than half a period")
    basis = np.column_stack([np.ones_like(phases), np.cos(phases), np.sin(phases)])
    coef, *_ = np.linalg.lstsq(basis, ratios, rcond=None)
    a0, p, q = coef
    b0 = math.hypot(p, q)
    if b0 < 1e-14 * max(1.0, abs(a0)):
        warnings.warn("no oscillation detected: phase is undefined", RuntimeWarning)
        resid = ratios - a0
        return FitResult(
            params=np.array([a0, 0.0, math.nan]),
            stderr=np.array([float(np.std(resid) / math.sqrt(len(ratios))), 0.0, math.nan]),
            residual_norm=float(np.linalg.norm(resid)),
            converged=True,
            iterations=1,
        )

    def fn(phi, pr):
        return pr[0] + abs(pr[1]) * np.cos(phi - pr[2])

    res = lsq_fit(fn, phases, ratios, [a0, b0, math.atan2(q, p)], tol=tol)
    a, b, phi0 = res.params
    phi0 = math.atan2(math.sin(phi0), math.cos(phi0))
    return FitResult(np.array([a, abs(b), phi0]), res.stderr, res.residual_norm,
                     res.converged, res.iterations)


# ---------------------------------------------------------------------------
# reflectivity from quasi-distribution grids
# ---------------------------------------------------------------------------

GRID_POINTS = 101
GRID_EXTENT = 4.0


def wigner_axes(n: int = GRID_POINTS, extent: float = GRID_EXTENT) -> np.ndarray:
    return np.linspace(-extent, extent, n)


def coherent_wigner(alpha: complex, n: int = GRID_POINTS, extent: float = GRID_EXTENT) -> np.ndarray:
    """Gaussian quasi-distribution of a coherent state on a square grid."""
    ax = wigner_axes(n, extent)
    x, y = np.meshgrid(ax, ax, indexing="ij")
    return (2.0 / math.pi) * np.exp(-2.0 * ((x - alpha.real) ** 2 + (y - alpha.imag) ** 2))


def _window_mask(window, n: int, extent: float):
    xmin, xmax, ymin, ymax = window
    if xmin >= xmax or ymin >= ymax:
        raise ValueError("window must have positive extent")
    if xmin < -extent or xmax > extent or ymin < -extent or ymax > extent:
        raise ValueError("window must lie inside the grid")
    ax = wigner_axes(n, extent)
    x, y = np.meshgrid(ax, ax, indexing="ij")
    mask = (x >= xmin) & (x <= xmax) & (y >= ymin) & (y <= ymax)
    if not mask.any():
        raise ValueError("window contains no grid points")
    return x, y, mask


def _windowed_amplitude(w, x, y, mask, cell: float) -> complex:
    return complex(np.sum(w[mask] * x[mask]) * cell, np.sum(w[mask] * y[mask]) * cell)


def kappa_from_wigner(grid_ref, grid_refl, window, extent: float = GRID_EXTENT) -> float:
    """Reflectivity |alpha_refl/alpha_ref|^2 from two windowed grids.

    The mean amplitudes are plain integrals of W(alpha)*alpha over the
    window, with no renormalization by the windowed mass; common scale
    factors on both grids therefore cancel. Warns when the window cuts
    away more than 1% of a unit-normalized distribution.
    """
    grid_ref = np.asarray(grid_ref, dtype=float)
    grid_refl = np.asarray(grid_refl, dtype=float)
    if grid_ref.shape != grid_refl.shape or grid_ref.shape[0] != grid_ref.shape[1]:
        raise ValueError("grids must be square and share axes")
    n = grid_ref.shape[0]
    ax = wigner_axes(n, extent)
    cell = (ax[1] - ax[0]) ** 2
    x, y, mask = _window_mask(window, n, extent)
    for name, g in (("reference", grid_ref), ("reflected", grid_refl)):
        inside = np.sum(np.abs(g[mask])) * cell
        total = max(np.sum(np.abs(g)) * cell, 1e-300)
        if inside < 0.99 * min(total, 1.0):
            warnings.warn(f"window clips over 1% of the {name} grid mass", RuntimeWarning)
    a_ref = _windowed_amplitude(grid_ref, x, y, mask, cell)
    a_refl = _windowed_amplitude(grid_refl, x, y, mask, cell)
    denom = abs(a_ref) ** 2
    if denom == 0.0:
        raise ValueError("reference amplitude vanishes inside the window")
    return abs(a_refl) ** 2 / denom


def kappa_with_uncertainty(
    grid_ref, grid_refl, window, sigma_w: float, extent: float = GRID_EXTENT
) -> Measured:
    """Reflectivity estimate with noise propagated from the grid values.

    Assumes independent additive noise of standard deviation sigma_w on
    every grid cell of both grids.
    """
    grid_ref = np.asarray(grid_ref, dtype=float)
    grid_refl = np.asarray(grid_refl, dtype=float)
    n = grid_ref.shape[0]
    ax = wigner_axes(n, extent)
    cell = (ax[1] - ax[0]) ** 2
    x, y, mask = _window_mask(window, n, extent)
    kappa = kappa_from_wigner(grid_ref, grid_refl, window, extent)
    var_x = (sigma_w * cell) ** 2 * float(np.sum(x[mask] ** 2))
    var_y = (sigma_w * cell) ** 2 * float(np.sum(y[mask] ** 2))
    a1 = _windowed_amplitude(grid_ref, x, y, mask, cell)
    a2 = _windowed_amplitude(grid_refl, x, y, mask, cell)
    r1s, r2s = abs(a1) ** 2, abs(a2) ** 2
    var = 4.0 * kappa**2 * (
        (a2.real**2 * var_x + a2.imag**2 * var_y) / r2s**2
        + (a1.real**2 * var_x + a1.imag**2 * var_y) / r1s**2
    )
    return Measured(value=kappa, sigma=math.sqrt(var))


def pair_window(amp_ref: float, amp_refl: float, margin: float = 2.0) -> tuple:
    """Axis-aligned box covering two on-axis amplitudes with clearance."""
    return (min(amp_refl, amp_ref) - margin, max(amp_refl, amp_ref) + margin,
            -margin, margin)


def estimate_kappa(pairs, windows, sigma_w: float, extent: float = GRID_EXTENT) -> Measured:
    """Inverse-variance combination of per-amplitude reflectivity estimates."""
    num = 0.0
    den = 0.0
    for (grid_ref, grid_refl), window in zip(pairs, windows):
        m = kappa_with_uncertainty(grid_ref, grid_refl, window, sigma_w, extent)
        wgt = 1.0 / m.sigma**2
        num += wgt * m.value
        den += wgt
    return Measured(value=num / den, sigma=1.0 / math.sqrt(den))


# ---------------------------------------------------------------------------
# synthetic-data generators for closed-loop checks
# ---------------------------------------------------------------------------

def make_ramsey_data(n_i, model, noise, rng, t_max: float = 12e-6, n_points: int = 241, amp: float = 1.0):
    t = np.linspace(0.0, t_max, n_points)
    y = amp * ramsey_signal(t, n_i, model) + noise * rng.standard_normal(n_points)
    return t, y


def make_relaxation_data(n_init, model, shots, rng, t_max: float = 20e-6, n_points: int = 201):
    """Relaxation curve sampled with binomial counting noise."""
    t = np.linspace(0.0, t_max, n_points)
    p = relaxation_signal(t, n_init, model)
    y = rng.binomial(shots, p) / shots
    sigma = np.sqrt(np.clip(y * (1.0 - y), 1e-9, None) / shots)
    return t, y, sigma


def make_interference_data(offset, amplitude, phi0, noise, rng, n_points: int = 181):
    phi = np.linspace(-math.pi, math.pi, n_points, endpoint=False)
    y = offset + amplitude * np.cos(phi - phi0) + noise * rng.standard_normal(n_points)
    return phi, y


def make_wigner_pair(amp_ref: float, kappa: float, sigma_w: float = 0.0, rng=None, spur: bool = False):
    """Reference and reflected grids for an on-axis probe of amplitude amp_ref.

    spur=True adds a parasitic blob far on the negative axis to both grids,
    emulating a bright background feature the window must reject.
    """
    amp_refl = math.sqrt(kappa) * amp_ref
    w_ref = coherent_wigner(complex(amp_ref, 0.0))
    w_refl = coherent_wigner(complex(amp_refl, 0.0))
    if spur:
        bg = 0.3 * coherent_wigner(complex(-3.3, 0.0))
        w_ref = w_ref + bg
        w_refl = w_refl + bg
    if sigma_w > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma_w > 0")
        w_ref = w_ref + sigma_w * rng.standard_normal(w_ref.shape)
        w_refl = w_refl + sigma_w * rng.standard_normal(w_refl.shape)
    return w_ref, w_refl
