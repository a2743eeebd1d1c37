"""Synthetic-data generator: label patterns, correlations, noise calibration."""

import numpy as np
import pytest

from fosclust.simulation import (SimulationSpec, ar_correlated_predictors,
                                 calibrate_noise, draw_noise, fourier_basis,
                                 make_design, squared_exp_cov, truth_labels)


def test_truth_label_patterns_at_reference_size():
    assert truth_labels(1, 15).tolist() == [0] * 7 + [1] * 4 + [2] * 4
    assert truth_labels(2, 15).tolist() == [1] * 7 + [2] * 4 + [3] * 4
    assert truth_labels(3, 15).tolist() == list(range(1, 16))
    assert truth_labels(4, 15).tolist() == [0] * 7 + list(range(1, 9))


def test_truth_labels_scale_and_stay_nonempty():
    for design in (1, 2):
        for p in (5, 9, 20, 31):
            labels = truth_labels(design, p)
            assert labels.size == p
            _, counts = np.unique(labels, return_counts=True)
            assert counts.min() >= 1
            assert len(counts) == 3
    with pytest.raises(ValueError):
        truth_labels(1, 2)
    with pytest.raises(ValueError):
        truth_labels(4, 1)


def test_fourier_columns_have_unit_root_mean_square():
    for t in (6, 15, 40):
        basis = fourier_basis(np.linspace(0, 1, t))
        assert basis.shape == (t, 3)
        rms = np.sqrt(np.mean(basis ** 2, axis=0))
        assert np.allclose(rms, 1.0, atol=1e-12)


def test_predictor_correlation_decays_geometrically():
    rng = np.random.default_rng(42)
    x = ar_correlated_predictors(rng, 100000, 4, rho=0.75)
    cov = np.cov(x[:, 0], x[:, 2])[0, 1]
    assert abs(cov - 0.5625) < 0.01


def test_squared_exp_cov_values_and_psd():
    grid = np.linspace(0, 1, 15)
    cov = squared_exp_cov(grid, 10.0)
    assert np.allclose(np.diag(cov), 1.0)
    step = grid[1] - grid[0]
    assert np.isclose(cov[0, 1], np.exp(-10.0 * step ** 2))
    assert np.isclose(cov[2, 7], np.exp(-10.0 * (grid[2] - grid[7]) ** 2))
    assert np.linalg.eigvalsh(cov).min() > -1e-10


def test_noise_calibration_solves_for_the_nugget():
    signal = np.array([[0.0, 2.0], [2.0, 0.0]])  # variance 1
    assert calibrate_noise(signal, np.zeros((2, 2)), 1.0) == 1.0
    # total noise variance must be var/target = 2; smooth part covers 0.5
    signal2 = np.array([[0.0, np.sqrt(8.0)], [np.sqrt(8.0), 0.0]])
    assert np.isclose(calibrate_noise(signal2, 0.5 * np.eye(2), 1.0), 1.5)
    # smooth component already too strong: nugget hits the floor
    assert calibrate_noise(signal, 50.0 * np.eye(2), 1.0) == 1e-8
    with pytest.raises(ValueError):
        calibrate_noise(np.ones((3, 4)), np.zeros((4, 4)), 1.0)


def test_noise_lag_one_correlation_tracks_the_kernel():
    grid = np.linspace(0, 1, 15)
    sigma_prime = squared_exp_cov(grid, 10.0)
    rng = np.random.default_rng(3)
    noise = draw_noise(rng, 10000, sigma_prime, 1e-8)
    lag1 = np.corrcoef(noise[:, 6], noise[:, 7])[0, 1]
    expected = np.exp(-10.0 * (grid[1] - grid[0]) ** 2)
    assert abs(lag1 - expected) < 0.05


def test_draw_noise_rejects_negative_nugget():
    with pytest.raises(ValueError):
        draw_noise(np.random.default_rng(0), 3, np.eye(2), -0.5)


def test_make_design_is_deterministic():
    spec = SimulationSpec(design_id=1, n_subjects=25, seed=99)
    d1, t1 = make_design(spec)
    d2, t2 = make_design(SimulationSpec(design_id=1, n_subjects=25, seed=99))
    assert np.array_equal(d1.response, d2.response)
    assert np.array_equal(d1.free, d2.free)
    assert np.array_equal(d1.clusterable, d2.clusterable)
    assert np.array_equal(t1.cluster_curves, t2.cluster_curves)
    assert np.array_equal(t1.free_curves, t2.free_curves)
    assert t1.sigma2 == t2.sigma2
    d3, _ = make_design(SimulationSpec(design_id=1, n_subjects=25, seed=100))
    assert not np.array_equal(d1.response, d3.response)


def test_make_design_truth_structure():
    for design in (1, 2, 3, 4):
        spec = SimulationSpec(design_id=design, n_subjects=30, seed=7)
        dataset, truth = make_design(spec)
        assert dataset.response.shape == (30, 15)
        assert np.array_equal(dataset.free[:, 0], np.ones(30))
        assert np.array_equal(truth.labels, truth_labels(design, 15))
        # intercept carries no effect; other free curves do
        assert np.array_equal(truth.free_curves[:, 0], np.zeros(15))
        assert np.abs(truth.free_curves[:, 1:]).max() > 0
        # zero-labelled predictors have identically zero curves
        zero = truth.labels == 0
        assert np.all(truth.cluster_curves[:, zero] == 0.0)
        if zero.any():
            assert np.abs(truth.cluster_curves[:, ~zero]).max() > 0
        # same label, same curve
        for lab in np.unique(truth.labels[truth.labels > 0]):
            cols = truth.cluster_curves[:, truth.labels == lab]
            assert np.all(cols == cols[:, :1])
        assert truth.sigma2 >= 1e-8


def test_design_three_curves_pairwise_distinct():
    _, truth = make_design(SimulationSpec(design_id=3, n_subjects=20, seed=1))
    curves = truth.cluster_curves
    for i in range(15):
        for j in range(i + 1, 15):
            assert np.abs(curves[:, i] - curves[:, j]).max() > 1e-6


def test_realized_snr_is_near_target():
    ratios = []
    for seed in range(100):
        spec = SimulationSpec(design_id=2, n_subjects=40, seed=seed)
        dataset, truth = make_design(spec)
        signal = (dataset.free @ truth.free_curves.T
                  + dataset.clusterable @ truth.cluster_curves.T)
        noise = dataset.response - signal
        ratios.append(np.var(signal) / np.var(noise))
    assert 0.9 < np.mean(ratios) < 1.1


def test_spec_validation():
    with pytest.raises(ValueError):
        SimulationSpec(design_id=5, n_subjects=10)
    with pytest.raises(ValueError):
        SimulationSpec(design_id=1, n_subjects=1)
    with pytest.raises(ValueError):
        SimulationSpec(design_id=1, n_subjects=10, target_snr=0.0)
    with pytest.raises(ValueError):
        SimulationSpec(design_id=1, n_subjects=10, rho=1.0)
