"""Synthetic data generator for the four benchmark designs.

Each design places the clusterable predictors into true clusters (with an
optional all-zero cluster), draws smooth truth curves from a three-term
Fourier family, and adds noise with a squared-exponential covariance plus a
nugget calibrated to a target signal-to-noise ratio.

Design patterns over the clusterable predictors:

1. three clusters, the first one zero
2. the same three clusters, none zero
3. every predictor its own cluster, none zero
4. every nonzero predictor its own cluster, the first block zero

The generator is deterministic given the spec's seed, with a fixed draw
order: predictors, free covariates, cluster truth, free truth, noise.
"""

import numpy as np
from dataclasses import dataclass

from .model import FunctionalDataset


@dataclass
class SimulationSpec:
    """Shape, correlation, and noise settings for one synthetic dataset."""

    design_id: int
    n_subjects: int
    n_points: int = 15
    n_free: int = 5
    n_clusterable: int = 15
    rho: float = 0.75
    lengthscale: float = 10.0
    target_snr: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.design_id not in (1, 2, 3, 4):
            raise ValueError("design_id must be 1, 2, 3, or 4")
        if self.n_subjects < 2:
            raise ValueError("need at least two subjects")
        if self.n_points < 2:
            raise ValueError("need at least two grid points")
        if self.n_free < 1 or self.n_clusterable < 1:
            raise ValueError("predictor counts must be positive")
        if self.target_snr <= 0:
            raise ValueError("target_snr must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")

    @property
    def grid(self):
        return np.linspace(0.0, 1.0, self.n_points)


@dataclass
class SimulatedTruth:
    """True curves, true labels (0 marks a zero effect), and noise level."""

    free_curves: np.ndarray     # (T, P_f)
    cluster_curves: np.ndarray  # (T, P_c)
    labels: np.ndarray          # (P_c,)
    sigma2: float


def fourier_basis(grid):
    """Constant, sine, and cosine columns with unit root-mean-square."""
    grid = np.asarray(grid, dtype=float)
    basis = np.column_stack([
        np.ones_like(grid),
        np.sin(2.0 * np.pi * grid),
        np.cos(2.0 * np.pi * grid),
    ])
    return basis / np.sqrt(np.mean(basis ** 2, axis=0))


def truth_labels(design_id, n_clusterable):
    """True cluster labels for a design, scaled to the predictor count.

    With 15 predictors the three-group designs split 7/4/4 and design 4
    zeroes the first 7; other counts keep those proportions, always leaving
    every group nonempty.
    """
    p = n_clusterable
    if design_id in (1, 2):
        small = max(1, round(p * 4 / 15))
        lead = p - 2 * small
        if lead < 1:
            raise ValueError("too few clusterable predictors for 3 groups")
        first = 0 if design_id == 1 else 1
        shift = 0 if design_id == 1 else 1
        return np.concatenate([
            np.full(lead, first),
            np.full(small, 1 + shift),
            np.full(small, 2 + shift),
        ]).astype(int)
    if design_id == 3:
        return np.arange(1, p + 1)
    n_zero = max(1, round(p * 7 / 15))
    if n_zero >= p:
        raise ValueError("too few clusterable predictors for design 4")
    return np.concatenate([
        np.zeros(n_zero, dtype=int),
        np.arange(1, p - n_zero + 1),
    ])


def ar_correlated_predictors(rng, n_subjects, n_pred, rho):
    """Rows from a zero-mean Gaussian with covariance rho^|p - p'|."""
    offsets = np.arange(n_pred)
    cov = rho ** np.abs(offsets[:, None] - offsets[None, :])
    chol = np.linalg.cholesky(cov)
    return rng.standard_normal((n_subjects, n_pred)) @ chol.T


def squared_exp_cov(grid, lengthscale):
    """Squared-exponential kernel matrix over the grid values."""
    grid = np.asarray(grid, dtype=float)
    diff = grid[:, None] - grid[None, :]
    return np.exp(-lengthscale * diff ** 2)


def calibrate_noise(signal, sigma_prime, target_snr):
    """Nugget variance hitting the target signal-to-noise ratio.

    The ratio is the variance of all signal entries over the average total
    noise variance trace(sigma_prime + sigma2 I)/T. The returned nugget is
    floored at 1e-8, so the achieved ratio can exceed the target when the
    smooth noise component alone is already too strong.
    """
    signal = np.asarray(signal, dtype=float)
    var = float(np.var(signal))
    if var <= 0:
        raise ValueError("signal must not be constant")
    t = sigma_prime.shape[0]
    sigma2 = var / target_snr - float(np.trace(sigma_prime)) / t
    return max(sigma2, 1e-8)


def draw_noise(rng, n_rows, sigma_prime, sigma2):
    """Independent noise curves with covariance sigma_prime + sigma2 I."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    t = sigma_prime.shape[0]
    chol = np.linalg.cholesky(sigma_prime + sigma2 * np.eye(t))
    return rng.standard_normal((n_rows, t)) @ chol.T


def make_design(spec):
    """Generate one dataset and its generating truth."""
    rng = np.random.default_rng(spec.seed)
    grid = spec.grid
    labels = truth_labels(spec.design_id, spec.n_clusterable)

    x = ar_correlated_predictors(rng, spec.n_subjects, spec.n_clusterable,
                                 spec.rho)
    w = np.column_stack([
        np.ones(spec.n_subjects),
        rng.standard_normal((spec.n_subjects, spec.n_free - 1)),
    ])

    basis = fourier_basis(grid)
    n_true = int(labels.max())
    cluster_curves = np.zeros((spec.n_points, spec.n_clusterable))
    if n_true:
        per_cluster = basis @ rng.standard_normal((3, n_true))
        nonzero = labels > 0
        cluster_curves[:, nonzero] = per_cluster[:, labels[nonzero] - 1]
    free_curves = np.zeros((spec.n_points, spec.n_free))
    if spec.n_free > 1:
        free_curves[:, 1:] = basis @ rng.standard_normal((3, spec.n_free - 1))

    signal = w @ free_curves.T + x @ cluster_curves.T
    sigma_prime = squared_exp_cov(grid, spec.lengthscale)
    sigma2 = calibrate_noise(signal, sigma_prime, spec.target_snr)
    response = signal + draw_noise(rng, spec.n_subjects, sigma_prime, sigma2)

    dataset = FunctionalDataset(response=response, free=w, clusterable=x,
                                grid=grid)
    truth = SimulatedTruth(free_curves=free_curves,
                           cluster_curves=cluster_curves,
                           labels=labels, sigma2=sigma2)
    return dataset, truth
