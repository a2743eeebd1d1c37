"""Model containers, membership encoding, and design assembly."""

import numpy as np
import pytest

from fosclust.basis import bspline_design
from fosclust.model import FunctionalDataset, ModelState, PriorConfig, \
    assemble_design, membership_matrix, one_hot, residual_free, vec
from _oracles import loop_residual, loop_vec_transpose


def test_one_hot_definition():
    assert np.array_equal(one_hot(np.array([1, 1, 2]), 2),
                          [[1, 0], [1, 0], [0, 1]])


def test_one_hot_single_cluster_column():
    out = one_hot(np.ones(7, dtype=int), 1)
    assert np.array_equal(out, np.ones((7, 1)))


def test_one_hot_design_one_column_sums():
    labels = np.array([1] * 7 + [2] * 4 + [3] * 4)
    assert np.array_equal(one_hot(labels, 3).sum(axis=0), [7, 4, 4])


def test_one_hot_rejects_out_of_range_labels():
    with pytest.raises(ValueError):
        one_hot(np.array([0, 1]), 1)
    with pytest.raises(ValueError):
        one_hot(np.array([1, 3]), 2)


def test_one_hot_round_trips_compacted_labels():
    rng = np.random.default_rng(0)
    for _ in range(20):
        k = int(rng.integers(1, 6))
        labels = np.concatenate([np.arange(1, k + 1),
                                 rng.integers(1, k + 1, size=10)])
        encoded = one_hot(labels, k)
        assert np.array_equal(np.argmax(encoded, axis=1) + 1, labels)


def test_membership_matrix_zero_labels_give_zero_rows():
    member = membership_matrix(np.array([0, 1, 0, 2]), 2)
    assert np.array_equal(member, [[0, 0], [1, 0], [0, 0], [0, 1]])
    assert np.array_equal(membership_matrix(np.zeros(3, dtype=int), 0),
                          np.zeros((3, 0)))


def test_assemble_design_identity_membership():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((4, 3))
    theta = bspline_design(np.linspace(0, 1, 5), 4)
    assert np.allclose(assemble_design(x, np.eye(3), theta),
                       np.kron(x, theta))


def test_assemble_design_shape():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((30, 15))
    member = one_hot(np.array([1] * 7 + [2] * 4 + [3] * 4), 3)
    theta = bspline_design(np.linspace(0, 1, 15), 8)
    assert assemble_design(x, member, theta).shape == (450, 24)


def test_assemble_design_vectorization_identity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        t = int(rng.integers(2, 6))
        p_c = int(rng.integers(1, 5))
        k = int(rng.integers(1, p_c + 1))
        m = int(rng.integers(2, 5))
        x = rng.standard_normal((n, p_c))
        member = one_hot(np.concatenate([np.arange(1, k + 1),
                                         rng.integers(1, k + 1,
                                                      size=p_c - k)]), k)
        theta = rng.standard_normal((t, m))
        coef = rng.standard_normal((m, k))
        design = assemble_design(x, member, theta)
        stacked = design @ vec(coef)
        direct = vec(theta @ coef @ (x @ member).T)
        assert np.abs(stacked - direct).max() < 1e-10


def test_residual_free_exact_fit_is_zero():
    rng = np.random.default_rng(4)
    theta = bspline_design(np.linspace(0, 1, 5), 4)
    coef = rng.standard_normal((4, 2))
    w = np.column_stack([np.ones(6), rng.standard_normal(6)])
    y = (theta @ coef @ w.T).T
    assert np.array_equal(residual_free(y, theta, coef, w), np.zeros(30))


def test_residual_free_zero_coefficients():
    rng = np.random.default_rng(5)
    y = rng.standard_normal((3, 4))
    theta = bspline_design(np.linspace(0, 1, 4), 3, degree=2)
    w = np.ones((3, 1))
    out = residual_free(y, theta, np.zeros((3, 1)), w)
    assert np.array_equal(out, loop_vec_transpose(y))


def test_residual_free_matches_loop_oracle():
    rng = np.random.default_rng(6)
    y = rng.standard_normal((4, 5))
    theta = bspline_design(np.linspace(0, 1, 5), 4)
    coef = rng.standard_normal((4, 2))
    w = np.column_stack([np.ones(4), rng.standard_normal(4)])
    assert np.allclose(residual_free(y, theta, coef, w),
                       loop_residual(y, theta, coef, w), atol=1e-12)


def test_dataset_validation():
    rng = np.random.default_rng(7)
    grid = np.linspace(0, 1, 5)
    y = rng.standard_normal((6, 5))
    w = np.ones((6, 1))
    x = rng.standard_normal((6, 2))
    ds = FunctionalDataset(y, w, x, grid)
    assert (ds.n_subjects, ds.n_points, ds.n_free, ds.n_clusterable) \
        == (6, 5, 1, 2)
    with pytest.raises(ValueError):
        FunctionalDataset(y, w[:-1], x, grid)
    with pytest.raises(ValueError):
        FunctionalDataset(y, w, x[:-1], grid)
    with pytest.raises(ValueError):
        FunctionalDataset(y[:, :-1], w, x, grid)
    with pytest.raises(ValueError):
        FunctionalDataset(y, np.empty((6, 0)), x, grid)
    with pytest.raises(ValueError):
        FunctionalDataset(y, w, np.empty((6, 0)), grid)


def test_prior_config_variant_properties():
    flags = {
        "fosr": (False, False, False),
        "fosr-pm": (False, True, False),
        "fosr-dp": (True, False, True),
        "fosr-dppm": (True, True, True),
    }
    for variant, (clusters, selects, updates_alpha) in flags.items():
        prior = PriorConfig(variant=variant)
        assert prior.clusters is clusters
        assert prior.selects is selects
        assert prior.updates_alpha is updates_alpha
    with pytest.raises(ValueError):
        PriorConfig(variant="ridge")
    with pytest.raises(ValueError):
        PriorConfig(a_lambda=0.0)
    with pytest.raises(ValueError):
        PriorConfig(alpha0=-1.0)


def test_model_state_check_and_copy():
    rng = np.random.default_rng(8)
    state = ModelState(
        free_coef=rng.standard_normal((4, 2)),
        cluster_coef=rng.standard_normal((4, 2)),
        labels=np.array([1, 2, 0, 2]),
        lambda_free=np.ones(2),
        lambda_cluster=np.ones(2),
        tau=1.0,
        alpha=1.0,
    )
    state.check()
    assert state.num_clusters == 2
    clone = state.copy()
    clone.labels[0] = 2
    assert state.labels[0] == 1

    gap = state.copy()
    gap.labels = np.array([1, 1, 0, 1])  # cluster 2 empty
    with pytest.raises(ValueError):
        gap.check()
    bad = state.copy()
    bad.lambda_cluster = np.ones(1)
    with pytest.raises(ValueError):
        bad.check()
    neg = state.copy()
    neg.tau = 0.0
    with pytest.raises(ValueError):
        neg.check()
