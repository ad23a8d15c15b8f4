import math
import warnings

import numpy as np
import pytest

from qradar import FitError, fit_interference, fit_ramsey, fit_relaxation, lsq_fit
from qradar.fitkit import (
    RamseyModel,
    RelaxationModel,
    coherent_wigner,
    estimate_kappa,
    kappa_from_wigner,
    kappa_with_uncertainty,
    make_interference_data,
    make_ramsey_data,
    make_relaxation_data,
    make_wigner_pair,
    pair_window,
    ramsey_signal,
    relaxation_signal,
    thermal_weights,
    wigner_axes,
)


# ---------------------------------------------------------------------------
# generic least squares
# ---------------------------------------------------------------------------

def test_lsq_fit_recovers_exponential():
    t = np.linspace(0.0, 5.0, 80)
    y = 2.5 * np.exp(-0.7 * t)
    res = lsq_fit(lambda x, p: p[0] * np.exp(-p[1] * x), t, y, [1.0, 1.0])
    np.testing.assert_allclose(res.params, [2.5, 0.7], rtol=1e-8)
    assert res.converged
    assert res.residual_norm < 1e-10


def test_lsq_fit_stderr_scales_with_noise():
    rng = np.random.default_rng(1)
    t = np.linspace(0.0, 5.0, 200)
    model = lambda x, p: p[0] * np.exp(-p[1] * x)
    lo = lsq_fit(model, t, 2.5 * np.exp(-0.7 * t) + rng.normal(0, 0.01, t.size), [1.0, 1.0])
    hi = lsq_fit(model, t, 2.5 * np.exp(-0.7 * t) + rng.normal(0, 0.1, t.size), [1.0, 1.0])
    assert hi.stderr[0] > 3.0 * lo.stderr[0]


def test_lsq_fit_weighted_residuals():
    t = np.linspace(0.0, 1.0, 50)
    y = 3.0 * t + 1.0
    sigma = np.full(t.size, 0.2)
    res = lsq_fit(lambda x, p: p[0] * x + p[1], t, y, [0.0, 0.0], sigma=sigma)
    np.testing.assert_allclose(res.params, [3.0, 1.0], atol=1e-10)


def test_lsq_fit_singular_jacobian():
    t = np.linspace(0.0, 1.0, 30)
    # p[1] never enters the model: one Jacobian column is identically zero
    with pytest.raises(FitError):
        lsq_fit(lambda x, p: p[0] * x + 0.0 * p[1], t, 2.0 * t, [1.0, 1.0])


# ---------------------------------------------------------------------------
# dispersive-shift oscillation model
# ---------------------------------------------------------------------------

def test_thermal_weights_geometric_ratio():
    w = thermal_weights(0.3, 12)  # photon numbers 0..12 inclusive
    assert w.size == 13
    np.testing.assert_allclose(w[1:] / w[:-1], np.full(12, 0.3 / 1.3), rtol=1e-12)
    assert w.sum() == pytest.approx(1.0 - (0.3 / 1.3) ** 13, rel=1e-12)


def test_ramsey_signal_starts_at_one():
    model = RamseyModel()
    for n_i in (0.01, 0.104, 1.0, 4.0):
        assert ramsey_signal(np.array([0.0]), n_i, model)[0] == pytest.approx(1.0, rel=1e-12)


def test_ramsey_signal_truncation_auto_extends():
    # a bright mode needs far more than the default 30 weights; the signal
    # must not depend on the configured floor
    t = np.linspace(0.0, 12e-6, 50)
    lo = ramsey_signal(t, 5.0, RamseyModel(kmax=30))
    hi = ramsey_signal(t, 5.0, RamseyModel(kmax=400))
    np.testing.assert_allclose(lo, hi, atol=1e-5)


def test_fit_ramsey_noise_free_exact():
    model = RamseyModel()
    t = np.linspace(0.0, 12e-6, 241)
    y = ramsey_signal(t, 0.104, model)
    res = fit_ramsey(t, y, model)
    assert res.params[1] == pytest.approx(0.104, rel=1e-6)


def test_fit_ramsey_amplitude_rescaling_invariance():
    model = RamseyModel()
    t = np.linspace(0.0, 12e-6, 241)
    y = ramsey_signal(t, 0.104, model)
    a = fit_ramsey(t, y, model)
    b = fit_ramsey(t, 1.7 * y, model)
    assert b.params[1] == pytest.approx(a.params[1], rel=1e-6)
    assert b.params[0] == pytest.approx(1.7 * a.params[0], rel=1e-6)


def test_fit_ramsey_noisy_closed_loop():
    rng = np.random.default_rng(17)
    model = RamseyModel()
    t, y = make_ramsey_data(0.104, model, 0.01, rng)
    res = fit_ramsey(t, y, model)
    assert abs(res.params[1] - 0.104) <= 2.0 * res.stderr[1]
    assert 5e-4 < res.stderr[1] < 5e-3


# ---------------------------------------------------------------------------
# relaxation thermometry
# ---------------------------------------------------------------------------

def test_relaxation_signal_limits():
    model = RelaxationModel(t1=4.1e-6, nth=0.0)
    p0 = relaxation_signal(np.array([0.0]), 8.6, model)[0]
    assert p0 == pytest.approx(1.0 / 9.6, rel=1e-12)
    p_inf = relaxation_signal(np.array([1.0]), 8.6, model)[0]  # t >> T1
    assert p_inf == pytest.approx(1.0, rel=1e-9)


def test_fit_relaxation_noise_free_exact():
    model = RelaxationModel(t1=4.1e-6, nth=0.01)
    t = np.linspace(0.0, 20e-6, 201)
    y = relaxation_signal(t, 8.6, model)
    res = fit_relaxation(t, y)
    assert res.params[0] == pytest.approx(8.6, rel=1e-6)
    assert res.params[1] == pytest.approx(4.1e-6, rel=1e-5)


def test_fit_relaxation_noisy_closed_loop():
    rng = np.random.default_rng(23)
    t, y, sigma = make_relaxation_data(8.6, RelaxationModel(nth=0.01), 10_000, rng)
    res = fit_relaxation(t, y, sigma=sigma)
    assert abs(res.params[0] - 8.6) <= 2.0 * res.stderr[0]
    assert 0.01 < res.stderr[0] < 0.2


# ---------------------------------------------------------------------------
# interference phase fit
# ---------------------------------------------------------------------------

def test_fit_interference_exact_recovery():
    phi = np.linspace(-math.pi, math.pi, 181, endpoint=False)
    y = 1.0 + 0.25 * np.cos(phi + 1.898)
    res = fit_interference(phi, y)
    np.testing.assert_allclose(res.params, [1.0, 0.25, -1.898], rtol=1e-8)


def test_fit_interference_amplitude_nonnegative_and_wrapped():
    phi = np.linspace(-math.pi, math.pi, 120, endpoint=False)
    y = 0.5 - 0.3 * np.cos(phi - 0.4)  # negative amplitude folds into the phase
    res = fit_interference(phi, y)
    assert res.params[1] == pytest.approx(0.3, rel=1e-8)
    assert -math.pi <= res.params[2] <= math.pi
    assert math.cos(res.params[2] - (0.4 + math.pi)) == pytest.approx(1.0, abs=1e-10)


def test_fit_interference_needs_phase_span():
    phi = np.linspace(0.0, 1.0, 40)  # far less than a full fringe
    with pytest.raises(FitError, match="span"):
        fit_interference(phi, np.cos(phi))


def test_fit_interference_flat_data_warns():
    phi = np.linspace(-math.pi, math.pi, 80, endpoint=False)
    with pytest.warns(RuntimeWarning):
        res = fit_interference(phi, np.full(phi.size, 0.7))
    assert res.params[0] == pytest.approx(0.7)
    assert res.params[1] == 0.0
    assert math.isnan(res.params[2])


def test_fit_interference_noisy_closed_loop():
    rng = np.random.default_rng(31)
    phi, y = make_interference_data(1.0, 0.25, -1.898, 0.02, rng)
    res = fit_interference(phi, y)
    assert abs(res.params[2] - (-1.898)) <= 2.0 * res.stderr[2]
    assert 2e-3 < res.stderr[2] < 3e-2


# ---------------------------------------------------------------------------
# phase-space reflectivity estimate
# ---------------------------------------------------------------------------

def test_coherent_wigner_normalized():
    grid = coherent_wigner(1.0 + 0.5j)
    ax = wigner_axes()
    cell = (ax[1] - ax[0]) ** 2
    assert grid.sum() * cell == pytest.approx(1.0, abs=2e-3)


def test_kappa_from_wigner_noise_free():
    kappa = 3.02e-2
    ref, refl = make_wigner_pair(1.0, kappa)
    window = pair_window(1.0, math.sqrt(kappa) * 1.0)
    est = kappa_from_wigner(ref, refl, window)
    assert abs(est - kappa) <= 1e-4


def test_kappa_window_rejects_background_spur():
    # a bright parasite off the probe axis wrecks whole-grid moments but
    # must barely touch the windowed estimate
    kappa = 3.02e-2
    ref, refl = make_wigner_pair(1.0, kappa, spur=True)
    window = pair_window(1.0, math.sqrt(kappa) * 1.0)
    est = kappa_from_wigner(ref, refl, window)
    assert abs(est - kappa) <= 5e-4
    whole = kappa_from_wigner(ref, refl, (-4.0, 4.0, -4.0, 4.0))
    assert abs(whole - kappa) > 100.0 * abs(est - kappa)


def test_kappa_window_clip_warns():
    ref, refl = make_wigner_pair(3.5, 0.03)  # blob pushed against the grid edge
    with pytest.warns(RuntimeWarning, match="window"):
        kappa_from_wigner(ref, refl, (-4.0, 4.0, -0.5, 0.5))


def test_kappa_zero_reference_rejected():
    ref = np.zeros((101, 101))
    refl = np.zeros((101, 101))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # empty grids also trip the clip check
        with pytest.raises(ValueError):
            kappa_from_wigner(ref, refl, (-2.0, 2.0, -2.0, 2.0))


def test_kappa_with_uncertainty_closed_loop():
    rng = np.random.default_rng(41)
    kappa = 3.02e-2
    ref, refl = make_wigner_pair(1.0, kappa, sigma_w=2e-3, rng=rng)
    window = pair_window(1.0, math.sqrt(kappa) * 1.0)
    est = kappa_with_uncertainty(ref, refl, window, 2e-3)
    assert abs(est.value - kappa) <= 2.0 * est.sigma
    assert est.sigma > 0.0


def test_estimate_kappa_combines_amplitudes():
    rng = np.random.default_rng(43)
    kappa = 3.02e-2
    amps = (0.8, 1.0, 1.2)
    pairs = [make_wigner_pair(a, kappa, sigma_w=2e-3, rng=rng) for a in amps]
    windows = [pair_window(a, math.sqrt(kappa) * a) for a in amps]
    combined = estimate_kappa(pairs, windows, 2e-3)
    singles = [kappa_with_uncertainty(p[0], p[1], w, 2e-3) for p, w in zip(pairs, windows)]
    assert combined.sigma < min(s.sigma for s in singles)
    assert abs(combined.value - kappa) <= 2.0 * combined.sigma


def test_generators_deterministic():
    a = make_ramsey_data(0.104, RamseyModel(), 0.01, np.random.default_rng(2))
    b = make_ramsey_data(0.104, RamseyModel(), 0.01, np.random.default_rng(2))
    np.testing.assert_array_equal(a[1], b[1])
