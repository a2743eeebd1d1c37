"""Joint-distribution correctness checks for the Gibbs sampler.

The test compares two simulators of the same joint distribution over
(parameters, data). The marginal-conditional side draws parameters from
the prior, independently each time. The successive-conditional side
alternates one Gibbs cycle against data freshly generated from the current
parameters. If the sampler's conditionals are correct both sides have the
same parameter marginals, so standardized differences of their moments
should look like standard normal draws.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .basis import make_basis
from .model import FunctionalDataset, ModelState, membership_matrix
from .sampler import gibbs_update


def _pick_prob(probs, rng):
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    return min(idx, probs.size - 1)


def _crp_labels(rng, n_items, alpha):
    """Sequential seating: join a cluster by size or open a new one."""
    labels = np.zeros(n_items, dtype=int)
    counts = []
    for i in range(n_items):
        weights = np.array(counts + [alpha], dtype=float)
        pick = _pick_prob(weights / weights.sum(), rng)
        if pick == len(counts):
            counts.append(1)
        else:
            counts[pick] += 1
        labels[i] = pick + 1
    return labels


def _prior_labels(rng, n_clusterable, alpha, prior):
    """Draw labels from the variant's prior over partitions."""
    variant = prior.variant
    if variant == "fosr":
        return np.arange(1, n_clusterable + 1)
    if variant == "fosr-dp":
        return _crp_labels(rng, n_clusterable, alpha)
    pi_null = rng.beta(0.5 * prior.alpha0, 0.5 * prior.alpha0)
    labels = np.zeros(n_clusterable, dtype=int)
    if variant == "fosr-pm":
        k = 0
        for p in range(n_clusterable):
            if rng.random() >= pi_null:
                k += 1
                labels[p] = k
        return labels
    counts = []
    for p in range(n_clusterable):
        if rng.random() < pi_null:
            continue
        weights = np.array(counts + [alpha], dtype=float)
        pick = _pick_prob(weights / weights.sum(), rng)
        if pick == len(counts):
            counts.append(1)
        else:
            counts[pick] += 1
        labels[p] = pick + 1
    return labels


def sample_prior_state(prior, n_free, n_clusterable, basis, rng):
    """Independent draw of all parameters from the prior hierarchy."""
    alpha = prior.alpha_shape / prior.alpha_rate
    if prior.updates_alpha:
        alpha = rng.gamma(prior.alpha_shape, 1.0 / prior.alpha_rate)
    labels = _prior_labels(rng, n_clusterable, alpha, prior)
    k = int(labels.max())
    chol = np.linalg.cholesky(basis.penalty)
    m = basis.num_basis

    if k:
        lambda_cluster = rng.gamma(prior.a_lambda, 1.0 / prior.b_lambda,
                                   size=k)
        cluster_coef = solve_triangular(
            chol.T, rng.standard_normal((m, k)), lower=False) \
            / np.sqrt(lambda_cluster)
    else:
        lambda_cluster = np.empty(0)
        cluster_coef = np.zeros((m, 0))
    lambda_free = rng.gamma(prior.a_lambda, 1.0 / prior.b_lambda,
                            size=n_free)
    free_coef = solve_triangular(
        chol.T, rng.standard_normal((m, n_free)), lower=False) \
        / np.sqrt(lambda_free)
    tau = rng.gamma(prior.a_tau, 1.0 / prior.b_tau)
    return ModelState(
        free_coef=free_coef,
        cluster_coef=cluster_coef,
        labels=labels,
        lambda_free=lambda_free,
        lambda_cluster=lambda_cluster,
        tau=tau,
        alpha=alpha,
        iteration=0,
    )


def draw_response(state, free, clusterable, basis, rng):
    """Generate data from the model given the current parameters."""
    member = membership_matrix(state.labels, state.num_clusters)
    mean = (basis.theta @ state.free_coef @ free.T
            + basis.theta @ state.cluster_coef @ (clusterable @ member).T).T
    noise = rng.standard_normal(mean.shape) / np.sqrt(state.tau)
    return mean + noise


def _tracked_stats(prior):
    stats = ["tau", "coef", "coef_sq", "lambda_free"]
    if prior.variant != "fosr":
        stats.append("num_clusters")
    if prior.updates_alpha:
        stats.append("alpha")
    return stats


def _record(state):
    return {
        "tau": state.tau,
        "coef": state.free_coef[0, 0],
        "coef_sq": state.free_coef[0, 0] ** 2,
        "lambda_free": state.lambda_free[0],
        "num_clusters": float(state.num_clusters),
        "alpha": state.alpha,
    }


def _batch_se(values, n_batches=100):
    values = values[: (values.size // n_batches) * n_batches]
    means = values.reshape(n_batches, -1).mean(axis=1)
    return float(np.std(means, ddof=1) / np.sqrt(n_batches))


def geweke_zscores(prior, n_subjects=8, n_points=6, n_free=1,
                   n_clusterable=4, n_samples=20000, seed=0):
    """Standardized moment differences between the two simulators.

    Tracked statistics: error precision, one coefficient entry and its
    square, one smoothing precision, and (where the variant has them) the
    cluster count and concentration parameter. The successive-conditional
    side's autocorrelation is absorbed by a batch-means standard error.
    """
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 1.0, n_points)
    basis = make_basis(grid, prior.num_basis, prior.degree, prior.mix)
    free = np.column_stack([np.ones(n_subjects),
                            rng.standard_normal((n_subjects, n_free - 1))])
    clusterable = rng.standard_normal((n_subjects, n_clusterable))
    names = _tracked_stats(prior)

    forward = {name: np.empty(n_samples) for name in names}
    for s in range(n_samples):
        state = sample_prior_state(prior, n_free, n_clusterable, basis, rng)
        snapshot = _record(state)
        for name in names:
            forward[name][s] = snapshot[name]

    successive = {name: np.empty(n_samples) for name in names}
    state = sample_prior_state(prior, n_free, n_clusterable, basis, rng)
    response = draw_response(state, free, clusterable, basis, rng)
    for s in range(n_samples):
        dataset = FunctionalDataset(response=response, free=free,
                                    clusterable=clusterable, grid=grid)
        gibbs_update(state, dataset, basis, prior, rng)
        response = draw_response(state, free, clusterable, basis, rng)
        snapshot = _record(state)
        for name in names:
            successive[name][s] = snapshot[name]

    scores = {}
    for name in names:
        fwd = forward[name]
        suc = successive[name]
        se_f = float(np.std(fwd, ddof=1) / np.sqrt(fwd.size))
        se_s = _batch_se(suc)
        denom = np.hypot(se_f, se_s)
        if denom == 0:
            scores[name] = 0.0 if fwd.mean() == suc.mean() else np.inf
        else:
            scores[name] = float((fwd.mean() - suc.mean()) / denom)
    return scores
