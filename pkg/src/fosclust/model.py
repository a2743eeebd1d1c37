"""Data containers, prior configuration, and the vectorization algebra.

The sampler works with the transposed response: stacking the columns of
``Y.T`` gives a response vector with one length-T block per subject, and the
coefficient matrices enter through Kronecker-product design matrices. All
identities in the sampler assume this column-stacked order, so it is fixed
here once: ``vec(Z) == Z.ravel(order="F")``.
"""

import numpy as np
from dataclasses import dataclass, field, replace

VARIANTS = ("fosr", "fosr-pm", "fosr-dp", "fosr-dppm")


def vec(matrix):
    """Column-stacking vectorization."""
    return np.ravel(matrix, order="F")


@dataclass
class FunctionalDataset:
    """Functional responses on a common grid with two predictor groups.

    Attributes
    ----------
    response : ndarray, shape (N, T)
        One response curve per row, observed on ``grid``.
    free : ndarray, shape (N, P_f)
        Predictors whose effects are only smoothed. The first column is the
        all-ones intercept.
    clusterable : ndarray, shape (N, P_c)
        Predictors whose effects are candidates for clustering and, under
        the point-mass variants, exclusion.
    grid : ndarray, shape (T,)
    """

    response: np.ndarray
    free: np.ndarray
    clusterable: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        self.response = np.asarray(self.response, dtype=float)
        self.free = np.asarray(self.free, dtype=float)
        self.clusterable = np.asarray(self.clusterable, dtype=float)
        self.grid = np.asarray(self.grid, dtype=float)
        n, t = self.response.shape
        if self.grid.shape != (t,):
            raise ValueError("grid length must match response columns")
        if self.free.ndim != 2 or self.free.shape[0] != n:
            raise ValueError("free predictor matrix must have N rows")
        if self.clusterable.ndim != 2 or self.clusterable.shape[0] != n:
            raise ValueError("clusterable predictor matrix must have N rows")
        if self.free.shape[1] < 1:
            raise ValueError("free predictors must include the intercept")
        if self.clusterable.shape[1] < 1:
            raise ValueError("need at least one clusterable predictor")

    @property
    def n_subjects(self):
        return self.response.shape[0]

    @property
    def n_points(self):
        return self.response.shape[1]

    @property
    def n_free(self):
        return self.free.shape[1]

    @property
    def n_clusterable(self):
        return self.clusterable.shape[1]


@dataclass
class PriorConfig:
    """Hyperparameters and the prior-variant selector.

    ``variant`` chooses between the four priors on the clusterable effects:

    - ``fosr``: one smoothed effect per predictor, no clustering.
    - ``fosr-pm``: per-predictor smoothed effect mixed with a point mass at
      the zero function.
    - ``fosr-dp``: Dirichlet-process clustering of effects.
    - ``fosr-dppm``: Dirichlet-process clustering plus a point mass at zero.
    """

    variant: str = "fosr-dp"
    a_lambda: float = 0.01
    b_lambda: float = 0.01
    a_tau: float = 0.01
    b_tau: float = 0.01
    alpha_shape: float = 1.0
    alpha_rate: float = 1.0
    alpha0: float = 2.0
    num_basis: int = 8
    mix: float = 0.001
    degree: int = 3

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        for name in ("a_lambda", "b_lambda", "a_tau", "b_tau",
                     "alpha_shape", "alpha_rate", "alpha0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def clusters(self):
        """Whether the variant clusters effects across predictors."""
        return self.variant in ("fosr-dp", "fosr-dppm")

    @property
    def selects(self):
        """Whether the variant can set effects exactly to zero."""
        return self.variant in ("fosr-pm", "fosr-dppm")

    @property
    def updates_alpha(self):
        """Whether a concentration parameter is sampled."""
        return self.variant in ("fosr-dp", "fosr-dppm")


@dataclass
class ModelState:
    """All sampled quantities of one Gibbs iteration.

    ``labels`` assigns each clusterable predictor to a cluster 1..K, with 0
    marking the null (excluded) cluster under the point-mass variants.
    Cluster ids are always compacted: every id in 1..K has at least one
    member, ``cluster_coef`` has one column per id, and ``lambda_cluster``
    one entry per id.
    """

    free_coef: np.ndarray        # (M, P_f)
    cluster_coef: np.ndarray     # (M, K)
    labels: np.ndarray           # (P_c,) ints
    lambda_free: np.ndarray      # (P_f,)
    lambda_cluster: np.ndarray   # (K,)
    tau: float
    alpha: float
    iteration: int = 0

    @property
    def num_clusters(self):
        return self.cluster_coef.shape[1]

    def check(self):
        """Raise if the label/cluster bookkeeping is inconsistent."""
        k = self.num_clusters
        if self.lambda_cluster.shape != (k,):
            raise ValueError("lambda_cluster length must equal cluster count")
        if np.any(self.labels < 0) or np.any(self.labels > k):
            raise ValueError("labels must lie in 0..K")
        present = np.unique(self.labels[self.labels > 0])
        if len(present) != k or (k > 0 and not np.array_equal(
                present, np.arange(1, k + 1))):
            raise ValueError("cluster ids must be compacted to 1..K")
        if np.any(self.lambda_free <= 0) or np.any(self.lambda_cluster <= 0):
            raise ValueError("precisions must be strictly positive")
        if self.tau <= 0 or self.alpha <= 0:
            raise ValueError("tau and alpha must be strictly positive")

    def copy(self):
        return replace(
            self,
            free_coef=self.free_coef.copy(),
            cluster_coef=self.cluster_coef.copy(),
            labels=self.labels.copy(),
            lambda_free=self.lambda_free.copy(),
            lambda_cluster=self.lambda_cluster.copy(),
        )


def one_hot(labels, num_clusters):
    """One-hot encode labels 1..K as a (len(labels), K) 0/1 matrix.

    Every label must reference an existing cluster; null-cluster members
    (label 0) are the caller's responsibility to exclude.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 1 or labels.max() > num_clusters):
        raise ValueError("labels must lie in 1..num_clusters")
    out = np.zeros((labels.size, num_clusters))
    out[np.arange(labels.size), labels - 1] = 1.0
    return out


def membership_matrix(labels, num_clusters):
    """Like :func:`one_hot` but label 0 maps to an all-zero row.

    A zero row drops the predictor's column from any product ``X @ C``, which
    is how the point-mass variants exclude null-cluster predictors from the
    design without re-slicing every matrix.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() > num_clusters):
        raise ValueError("labels must lie in 0..num_clusters")
    out = np.zeros((labels.size, num_clusters))
    keep = labels > 0
    out[np.flatnonzero(keep), labels[keep] - 1] = 1.0
    return out


def assemble_design(x, membership, theta):
    """Kronecker design matrix ``(X C) kron theta`` of shape (NT, MK).

    Satisfies ``vec(theta @ B @ (X C).T) == assemble_design(...) @ vec(B)``
    for any (M, K) coefficient matrix B, in the column-stacked order of
    :func:`vec`. A zero-column membership matrix yields a zero-column
    design, which downstream code must accept.
    """
    x = np.asarray(x, dtype=float)
    membership = np.asarray(membership, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if x.shape[1] != membership.shape[0]:
        raise ValueError("membership rows must match predictor columns")
    return np.kron(x @ membership, theta)


def residual_free(y, theta, free_coef, w):
    """Residual vector after removing the free effects.

    Returns ``vec(Y.T - theta @ A @ W.T)`` as a length-NT vector in the
    column-stacked (subject-major) order used throughout the sampler.
    """
    y = np.asarray(y, dtype=float)
    if theta.shape[1] != free_coef.shape[0] or free_coef.shape[1] != w.shape[1]:
        raise ValueError("incompatible shapes for free-effect residual")
    if y.shape != (w.shape[0], theta.shape[0]):
        raise ValueError("response shape must be (N, T)")
    return vec(y.T - theta @ free_coef @ w.T)
