"""B-spline design matrices and the full-rank roughness penalty.

Every prior in this package smooths basis coefficients through the same
penalty matrix: a second-difference P-spline penalty mixed with a small
multiple of the identity so that the prior precision is positive definite.
"""

import numpy as np
from scipy.interpolate import BSpline
from dataclasses import dataclass, field


def bspline_design(grid, num_basis, degree=3):
    """Evaluate a clamped B-spline basis on a common grid.

    Interior knots are equally spaced over ``[grid[0], grid[-1]]`` and the
    boundary knots are replicated ``degree + 1`` times, so the basis forms a
    partition of unity on the closed interval.

    Parameters
    ----------
    grid : array_like, shape (T,)
        Strictly increasing evaluation points.
    num_basis : int
        Number of basis functions M. Must satisfy ``M >= degree + 1``.
    degree : int
        Spline degree (default cubic).

    Returns
    -------
    ndarray, shape (T, M)
        Basis evaluations; every row sums to 1 and entries lie in [0, 1].
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least 2 points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    num_basis = int(num_basis)
    degree = int(degree)
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if num_basis < degree + 1:
        raise ValueError(
            f"num_basis={num_basis} requires at least degree+1={degree + 1} "
            "basis functions"
        )
    lo, hi = grid[0], grid[-1]
    n_interior = num_basis - degree - 1
    interior = np.linspace(lo, hi, n_interior + 2)[1:-1]
    knots = np.concatenate(
        [np.full(degree + 1, lo), interior, np.full(degree + 1, hi)]
    )
    return BSpline.design_matrix(grid, knots, degree).toarray()


def pspline_penalty(num_basis, mix=0.001):
    """Full-rank roughness penalty ``mix * I + (1 - mix) * D2'D2``.

    ``D2`` is the (M-2) x M second-difference matrix, so the second term
    penalizes curvature of the basis coefficients; the identity share keeps
    the matrix positive definite (minimum eigenvalue >= mix).

    Parameters
    ----------
    num_basis : int
        Basis dimension M, at least 3.
    mix : float
        Identity weight in (0, 1].

    Returns
    -------
    ndarray, shape (M, M)
        Symmetric positive-definite penalty matrix.
    """
    num_basis = int(num_basis)
    if num_basis < 3:
        raise ValueError("num_basis must be at least 3")
    if not 0 < mix <= 1:
        raise ValueError("mix must lie in (0, 1]")
    d2 = np.diff(np.eye(num_basis), n=2, axis=0)
    return mix * np.eye(num_basis) + (1.0 - mix) * (d2.T @ d2)


@dataclass
class BasisSystem:
    """A basis evaluated on a grid together with its roughness penalty.

    Attributes
    ----------
    grid : ndarray, shape (T,)
    theta : ndarray, shape (T, M)
        Basis evaluation matrix.
    penalty : ndarray, shape (M, M)
        Symmetric positive-definite coefficient penalty.
    mix : float
        Identity weight used to build the penalty.
    degree : int
        Spline degree of the basis.
    """

    grid: np.ndarray
    theta: np.ndarray
    penalty: np.ndarray
    mix: float
    degree: int
    # derived quantities used on every sampler iteration
    gram: np.ndarray = field(init=False)
    penalty_logdet: float = field(init=False)

    def __post_init__(self):
        t, m = self.theta.shape
        if self.grid.shape != (t,):
            raise ValueError("grid length does not match theta rows")
        if self.penalty.shape != (m, m):
            raise ValueError("penalty shape does not match basis dimension")
        self.gram = self.theta.T @ self.theta
        sign, logdet = np.linalg.slogdet(self.penalty)
        if sign <= 0:
            raise ValueError("penalty matrix is not positive definite")
        self.penalty_logdet = logdet

    @property
    def num_basis(self):
        return self.theta.shape[1]


def make_basis(grid, num_basis=8, degree=3, mix=0.001):
    """Construct a :class:`BasisSystem` on the given grid."""
    grid = np.asarray(grid, dtype=float)
    theta = bspline_design(grid, num_basis, degree)
    penalty = pspline_penalty(num_basis, mix)
    return BasisSystem(grid=grid, theta=theta, penalty=penalty, mix=mix,
                       degree=degree)
