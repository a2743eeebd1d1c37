"""Basis construction and roughness penalty."""

import numpy as np
import pytest

from fosclust.basis import BasisSystem, bspline_design, make_basis, \
    pspline_penalty
from _oracles import bspline_row, second_difference_penalty

# values from the Cox-de Boor recursion at x=0.35, M=5, cubic
COX_DE_BOOR_ROW = np.array(
    [0.02700000000000001, 0.49525, 0.39199999999999996,
     0.08574999999999998, 0.0])


def test_design_shape_and_row_sums():
    theta = bspline_design(np.linspace(0, 1, 15), 8)
    assert theta.shape == (15, 8)
    assert np.allclose(theta.sum(axis=1), 1.0, atol=1e-12)


def test_partition_of_unity_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(25):
        t = int(rng.integers(2, 40))
        degree = int(rng.integers(0, 4))
        m = int(rng.integers(degree + 1, degree + 9))
        grid = np.sort(rng.uniform(-2, 5, size=t))
        while np.any(np.diff(grid) <= 0):
            grid = np.sort(rng.uniform(-2, 5, size=t))
        theta = bspline_design(grid, m, degree)
        assert theta.shape == (t, m)
        assert np.all(theta >= -1e-15)
        assert np.all(theta <= 1 + 1e-15)
        assert np.allclose(theta.sum(axis=1), 1.0, atol=1e-12)


def test_single_point_matches_recursion_oracle():
    theta = bspline_design(np.array([0.0, 0.35, 1.0]), 5, 3)
    assert np.allclose(theta[1], COX_DE_BOOR_ROW, atol=1e-13)
    # and on a finer sweep of interior points
    for x in (0.1, 0.5, 0.77):
        mine = bspline_design(np.array([0.0, x, 1.0]), 6, 3)[1]
        ref = bspline_row(x, 0.0, 1.0, 6, 3)
        assert np.allclose(mine, ref, atol=1e-13)


def test_design_input_validation():
    with pytest.raises(ValueError):
        bspline_design(np.array([0.0, 0.5, 0.5, 1.0]), 5)
    with pytest.raises(ValueError):
        bspline_design(np.array([0.3]), 5)
    with pytest.raises(ValueError):
        bspline_design(np.linspace(0, 1, 10), 3, degree=3)


def test_penalty_identity_when_mix_is_one():
    assert np.array_equal(pspline_penalty(4, mix=1.0), np.eye(4))


def test_penalty_annihilates_linear_sequences():
    pen = pspline_penalty(8, mix=0.001)
    b = np.arange(1.0, 9.0)
    quad = b @ pen @ b
    assert np.isclose(quad, 0.001 * np.sum(b ** 2), atol=1e-12)


def test_penalty_minimum_eigenvalue():
    pen = pspline_penalty(8, mix=0.001)
    assert np.linalg.eigvalsh(pen).min() >= 0.001 - 1e-10


def test_penalty_matches_brute_force():
    for m in (3, 5, 12):
        for mix in (0.001, 0.4, 1.0):
            assert np.allclose(pspline_penalty(m, mix),
                               second_difference_penalty(m, mix),
                               atol=1e-14)


def test_penalty_cholesky_over_dimension_range():
    for m in range(3, 65):
        np.linalg.cholesky(pspline_penalty(m, mix=0.001))


def test_penalty_input_validation():
    with pytest.raises(ValueError):
        pspline_penalty(2)
    with pytest.raises(ValueError):
        pspline_penalty(8, mix=0.0)
    with pytest.raises(ValueError):
        pspline_penalty(8, mix=1.5)


def test_basis_system_derived_pieces():
    basis = make_basis(np.linspace(0, 1, 15), num_basis=8)
    assert basis.num_basis == 8
    assert np.allclose(basis.gram, basis.theta.T @ basis.theta)
    sign, logdet = np.linalg.slogdet(basis.penalty)
    assert sign > 0
    assert np.isclose(basis.penalty_logdet, logdet)


def test_basis_system_rejects_mismatched_shapes():
    grid = np.linspace(0, 1, 10)
    theta = bspline_design(grid, 5)
    with pytest.raises(ValueError):
        BasisSystem(grid=grid[:-1], theta=theta,
                    penalty=pspline_penalty(5), mix=0.001, degree=3)
    with pytest.raises(ValueError):
        BasisSystem(grid=grid, theta=theta,
                    penalty=pspline_penalty(4), mix=0.001, degree=3)
