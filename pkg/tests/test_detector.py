import math

import numpy as np
import pytest

from qradar import (
    DEFAULT_NU,
    OUTCOMES,
    PhotocountModel,
    RadarParams,
    error_exponent_categorical,
    normalize_nu,
    optimize_nu,
    outcome_distribution,
    receiver_means,
    thermal_class_probs,
)


def test_thermal_class_probs_frozen():
    mu = 0.22104395647632477
    probs = thermal_class_probs(mu)
    np.testing.assert_allclose(
        probs, [0.818971335, 0.148257288, 0.032771377], rtol=1e-8
    )
    assert probs.sum() == pytest.approx(1.0, abs=1e-15)


def test_thermal_class_probs_vacuum():
    np.testing.assert_allclose(thermal_class_probs(0.0), [1.0, 0.0, 0.0])


def test_thermal_class_probs_bright_limit():
    # a very bright mode almost always fires the two-or-more class
    assert thermal_class_probs(1e6)[2] > 0.999


def test_ideal_confusion_routes_classes():
    model = PhotocountModel.ideal()
    # 0 photons -> ee, 1 photon -> ge, >=2 photons -> gg
    np.testing.assert_allclose(model.confusion[0], [0.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(model.confusion[1], [0.0, 1.0, 0.0, 0.0])
    np.testing.assert_allclose(model.confusion[2], [1.0, 0.0, 0.0, 0.0])


def test_with_errors_rows_stochastic():
    model = PhotocountModel.with_errors(0.02, 0.03)
    np.testing.assert_allclose(model.confusion.sum(axis=1), np.ones(3), atol=1e-14)
    eps = 1.0 - (1.0 - 0.02) * (1.0 - 0.03)
    assert model.confusion[0, 3] == pytest.approx(1.0 - eps)
    assert model.confusion[0, 0] == pytest.approx(eps / 3.0)


def test_with_errors_zero_is_ideal():
    np.testing.assert_allclose(
        PhotocountModel.with_errors(0.0, 0.0).confusion, PhotocountModel.ideal().confusion
    )


def test_confusion_validation():
    bad = np.full((3, 4), 0.3)
    with pytest.raises(ValueError, match="row"):
        PhotocountModel(confusion=bad)
    with pytest.raises(ValueError, match="3x4"):
        PhotocountModel(confusion=np.eye(4))


def test_outcome_distribution_frozen():
    # mu = 1 splits the classes 1/2, 1/4, 1/4 and the ideal map reshuffles them
    dist = outcome_distribution(1.0, PhotocountModel.ideal())
    np.testing.assert_allclose(dist, [0.25, 0.25, 0.0, 0.5], atol=1e-15)


def test_error_exponent_categorical_frozen_reference():
    model = PhotocountModel.ideal()
    mu_yes, mu_no = receiver_means(RadarParams())
    e = error_exponent_categorical(
        outcome_distribution(mu_yes, model),
        outcome_distribution(mu_no, model),
        np.asarray(DEFAULT_NU, dtype=float),
    )
    assert e == pytest.approx(3.0842948317944923e-05, rel=1e-12)


def test_error_exponent_equal_distributions_is_zero():
    dist = np.array([0.4, 0.3, 0.2, 0.1])
    assert error_exponent_categorical(dist, dist, np.array([2.0, 1.0, 1.0, 0.0])) == 0.0


def test_error_exponent_degenerate_sigma():
    # deterministic distinct outcomes: zero spread but distinct means
    d_yes = np.array([1.0, 0.0, 0.0, 0.0])
    d_no = np.array([0.0, 1.0, 0.0, 0.0])
    e = error_exponent_categorical(d_yes, d_no, np.array([2.0, 1.0, 1.0, 0.0]))
    assert math.isinf(e)


def test_affine_invariance_sampled():
    rng = np.random.default_rng(11)
    nu = np.array([2.0, 1.0, 1.0, 0.0])
    for _ in range(50):
        d_yes = rng.dirichlet(np.ones(4))
        d_no = rng.dirichlet(np.ones(4))
        a = rng.uniform(0.1, 5.0)
        b = rng.uniform(-3.0, 3.0)
        e0 = error_exponent_categorical(d_yes, d_no, nu)
        e1 = error_exponent_categorical(d_yes, d_no, a * nu + b)
        assert e1 == pytest.approx(e0, rel=1e-10)


def test_normalize_nu_pins_ee_and_peak():
    out = normalize_nu(np.array([5.0, 3.0, 3.0, 1.0]))
    assert out[3] == 0.0
    assert out.max() == pytest.approx(1.0)
    np.testing.assert_allclose(out, [1.0, 0.5, 0.5, 0.0])


def test_normalize_nu_flips_negative():
    out = normalize_nu(np.array([-2.0, -1.0, -1.0, 0.0]))
    assert out.max() == pytest.approx(1.0)
    assert out.min() >= 0.0


def test_optimize_nu_recovers_indicator_optimum():
    # for these two distributions the best weighting is a pure indicator
    d_yes = np.array([0.3, 0.2, 0.1, 0.4])
    d_no = np.array([0.375, 0.25, 0.125, 0.25])
    nu, e = optimize_nu(d_yes, d_no)
    assert e == pytest.approx(1.32078828e-2, rel=1e-6)
    np.testing.assert_allclose(nu, [1.0, 1.0, 1.0, 0.0], atol=1e-6)


def test_optimize_nu_beats_default_at_reference_point():
    model = PhotocountModel.ideal()
    mu_yes, mu_no = receiver_means(RadarParams())
    d_yes = outcome_distribution(mu_yes, model)
    d_no = outcome_distribution(mu_no, model)
    e_default = error_exponent_categorical(d_yes, d_no, np.asarray(DEFAULT_NU, dtype=float))
    nu, e_opt = optimize_nu(d_yes, d_no)
    assert e_opt >= e_default
    assert e_opt == pytest.approx(3.093773713913745e-05, rel=1e-6)
    assert nu[3] == 0.0 and nu.max() == pytest.approx(1.0)


def test_optimize_nu_flat_distributions_warns():
    dist = np.array([0.25, 0.25, 0.25, 0.25])
    with pytest.warns(RuntimeWarning):
        nu, e = optimize_nu(dist, dist.copy())
    assert e == 0.0


def test_optimize_nu_matches_dense_grid_search():
    # optimizer must match a dense grid over the normalized simplex charts
    rng = np.random.default_rng(5)
    for _ in range(20):
        d_yes = rng.dirichlet(np.ones(4))
        d_no = rng.dirichlet(np.ones(4))
        _, e_opt = optimize_nu(d_yes, d_no)
        e_grid = 0.0
        axis = np.linspace(-1.0, 1.0, 41)
        for pinned in range(3):
            for a in axis:
                for b in axis:
                    nu = np.zeros(4)
                    nu[pinned] = 1.0
                    others = [i for i in range(3) if i != pinned]
                    nu[others[0]] = a
                    nu[others[1]] = b
                    e = error_exponent_categorical(d_yes, d_no, nu)
                    if math.isfinite(e):
                        e_grid = max(e_grid, e)
        assert e_opt >= e_grid - (1e-4 * e_grid + 1e-12)


def test_truncation_cost_is_modest_at_reference_point():
    # collapsing >=2 photons into one class keeps most of the ideal exponent
    from qradar import ideal_error_exponent

    params = RadarParams()
    model = PhotocountModel.ideal()
    mu_yes, mu_no = receiver_means(params)
    _, e_trunc = optimize_nu(
        outcome_distribution(mu_yes, model), outcome_distribution(mu_no, model)
    )
    ratio = e_trunc / ideal_error_exponent(params)
    assert 0.8 <= ratio <= 1.0


def test_outcome_labels():
    assert OUTCOMES == ("gg", "ge", "eg", "ee")
    assert list(DEFAULT_NU) == [2, 1, 1, 0]
