"""Collapsed Gibbs sampler for the four functional-effect priors.

One Gibbs cycle updates, in order: cluster labels (where the variant has
them), cluster coefficients, free coefficients, smoothing and error
precisions, and the concentration parameter (where present). Label updates
integrate the cluster coefficients out analytically, so a label move only
needs the marginal likelihood of the residual after free effects; the
coefficients are redrawn immediately afterwards, which keeps the cycle a
valid partially collapsed sampler.

All candidate probabilities are formed in log space and normalized with
log-sum-exp. Every matrix inversion goes through a Cholesky factor: log
determinants come from the factor's diagonal and quadratic forms from
triangular solves.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .basis import make_basis
from .model import ModelState, membership_matrix

LOG_2PI = float(np.log(2.0 * np.pi))


class ChainError(RuntimeError):
    """Numerical failure inside a chain, tagged with the iteration."""


@dataclass
class LabelUpdateWorkspace:
    """Candidate-independent pieces of the collapsed label update.

    A candidate assignment is a (labels, cluster precisions) pair. Its
    marginal log-likelihood depends on the data and the free coefficients
    only through the statistics below, so one workspace serves every
    candidate of a full label sweep: the free coefficients are held fixed
    while labels move.

    proj is the basis-projected residual cross-product with the clusterable
    predictors; resid_sq is the squared norm of the residual after free
    effects.
    """

    gram: np.ndarray          # (M, M) basis Gram matrix
    penalty: np.ndarray       # (M, M) roughness penalty
    penalty_logdet: float
    xtx: np.ndarray           # (P_c, P_c)
    proj: np.ndarray          # (M, P_c)
    resid_sq: float
    nt: int

    @property
    def num_basis(self):
        return self.gram.shape[0]

    @property
    def n_clusterable(self):
        return self.xtx.shape[0]


def label_workspace(dataset, basis, free_coef):
    """Build the sufficient statistics for one label sweep."""
    resid = dataset.response.T - basis.theta @ free_coef @ dataset.free.T
    return LabelUpdateWorkspace(
        gram=basis.gram,
        penalty=basis.penalty,
        penalty_logdet=basis.penalty_logdet,
        xtx=dataset.clusterable.T @ dataset.clusterable,
        proj=basis.theta.T @ resid @ dataset.clusterable,
        resid_sq=float(np.sum(resid * resid)),
        nt=resid.size,
    )


def normalize_log_weights(log_weights):
    """Exponentiate and normalize log weights stably.

    -inf entries are allowed and get probability zero; at least one entry
    must carry mass unless there is only a single candidate, which is then
    certain regardless of its weight.
    """
    log_weights = np.asarray(log_weights, dtype=float)
    if log_weights.size == 0:
        raise ValueError("need at least one candidate")
    if np.any(np.isnan(log_weights)) or np.any(log_weights == np.inf):
        raise ValueError("log weights must not be NaN or +inf")
    if log_weights.size == 1:
        return np.ones(1)
    top = log_weights.max()
    if top == -np.inf:
        raise ValueError("all candidates have zero probability")
    shifted = np.exp(log_weights - top)
    return shifted / shifted.sum()


def _pick(log_weights, rng):
    """Inverse-CDF draw over candidates in their given order."""
    probs = normalize_log_weights(log_weights)
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    return min(idx, probs.size - 1)


def _cluster_gram(workspace, labels, num_clusters):
    """Group-summed design cross-products (S, g) for the given labels."""
    member = membership_matrix(labels, num_clusters)
    s = member.T @ workspace.xtx @ member
    g = np.ravel(workspace.proj @ member, order="F")
    return s, g


def marginal_loglik(workspace, labels, lambda_cluster, tau):
    """Log-likelihood of the free-effect residual, clusters integrated out.

    The cluster coefficient matrix is marginalized under its Gaussian
    prior, leaving a zero-mean Gaussian for the residual whose log density
    this evaluates via a Cholesky factorization. With no non-null cluster
    the residual is pure noise and the density is diagonal.
    """
    lambda_cluster = np.asarray(lambda_cluster, dtype=float)
    if tau <= 0 or np.any(lambda_cluster <= 0):
        raise ValueError("precisions must be strictly positive")
    k = lambda_cluster.size
    base = -0.5 * workspace.nt * LOG_2PI
    if k == 0:
        return (base + 0.5 * workspace.nt * np.log(tau)
                - 0.5 * tau * workspace.resid_sq)
    m = workspace.num_basis
    s, g = _cluster_gram(workspace, labels, k)
    gmat = np.kron(s, workspace.gram)
    for j in range(k):
        block = slice(j * m, (j + 1) * m)
        gmat[block, block] += (lambda_cluster[j] / tau) * workspace.penalty
    chol = np.linalg.cholesky(gmat)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    half = solve_triangular(chol, g, lower=True)
    quad = float(half @ half)
    return (base
            + 0.5 * (workspace.nt - m * k) * np.log(tau)
            + 0.5 * m * np.sum(np.log(lambda_cluster))
            + 0.5 * k * workspace.penalty_logdet
            - 0.5 * logdet
            - 0.5 * tau * (workspace.resid_sq - quad))


def _detach(labels, lambda_cluster, p, prior, rng):
    """Remove predictor p from its cluster and pick the auxiliary precision.

    Returns compacted (labels, lambda_cluster) with labels[p] = -1 as a
    placeholder, plus the smoothing precision that a new cluster would use:
    the predictor's own value if it sat alone in a non-null cluster, a
    fresh prior draw otherwise.
    """
    labels = labels.copy()
    lam = lambda_cluster.copy()
    old = labels[p]
    labels[p] = -1
    if old > 0 and not np.any(labels == old):
        aux = lam[old - 1]
        lam = np.delete(lam, old - 1)
        labels[labels > old] -= 1
    else:
        aux = rng.gamma(prior.a_lambda, 1.0 / prior.b_lambda)
    return labels, lam, aux


def null_probability(n_null_others, n_others, alpha0):
    """Prior mass on the null cluster for one predictor's label move.

    n_null_others and n_others count the other predictors (the one being
    moved excluded); the Beta(alpha0/2, alpha0/2) mixing weight is already
    integrated out.
    """
    if n_others < 0 or not 0 <= n_null_others <= n_others:
        raise ValueError("need 0 <= n_null_others <= n_others")
    if alpha0 <= 0:
        raise ValueError("alpha0 must be strictly positive")
    return (n_null_others + 0.5 * alpha0) / (n_others + alpha0)


def _sweep_labels(workspace, labels, lambda_cluster, tau, alpha, prior, rng):
    """One full pass of single-predictor label moves, in ascending order."""
    labels = np.asarray(labels, dtype=int).copy()
    lam = np.asarray(lambda_cluster, dtype=float).copy()
    p_c = labels.size
    variant = prior.variant
    for p in range(p_c):
        labels, lam, aux = _detach(labels, lam, p, prior, rng)
        k = lam.size
        counts = np.bincount(labels[labels > 0], minlength=k + 1)[1:]

        # Candidate order is fixed: null (if allowed), existing ascending,
        # then a new cluster. Priors omit factors common to all candidates.
        cand_labels = []
        cand_logprior = []
        if prior.selects:
            n_null = int(np.sum(labels == 0))
            pi_null = null_probability(n_null, p_c - 1, prior.alpha0)
            cand_labels.append(0)
            cand_logprior.append(np.log(pi_null))
        if variant == "fosr-dp":
            for j in range(k):
                cand_labels.append(j + 1)
                cand_logprior.append(np.log(counts[j]))
            cand_labels.append(k + 1)
            cand_logprior.append(np.log(alpha))
        elif variant == "fosr-dppm":
            n_nonzero = (p_c - 1) - n_null
            denom = np.log(n_nonzero + alpha)
            for j in range(k):
                cand_labels.append(j + 1)
                cand_logprior.append(
                    np.log1p(-pi_null) + np.log(counts[j]) - denom)
            cand_labels.append(k + 1)
            cand_logprior.append(np.log1p(-pi_null) + np.log(alpha) - denom)
        else:  # fosr-pm: in or out, never a shared cluster
            cand_labels.append(k + 1)
            cand_logprior.append(np.log1p(-pi_null))

        logp = np.empty(len(cand_labels))
        for i, cand in enumerate(cand_labels):
            # A fresh prior draw of the auxiliary precision can underflow
            # to exactly 0 under very small shapes; the collapsed
            # likelihood's lambda -> 0 limit is -inf, so score it directly.
            if cand == k + 1 and aux <= 0.0:
                logp[i] = -np.inf
                continue
            labels[p] = cand
            lam_cand = np.append(lam, aux) if cand == k + 1 else lam
            logp[i] = cand_logprior[i] + marginal_loglik(
                workspace, labels, lam_cand, tau)
        chosen = cand_labels[_pick(logp, rng)]
        labels[p] = chosen
        if chosen == k + 1:
            lam = np.append(lam, aux)
    return labels, lam


def update_labels_dp(state, dataset, basis, prior, rng):
    """Resample all cluster labels under the plain clustering prior."""
    workspace = label_workspace(dataset, basis, state.free_coef)
    return _sweep_labels(workspace, state.labels, state.lambda_cluster,
                         state.tau, state.alpha, prior, rng)


def update_labels_dppm(state, dataset, basis, prior, rng):
    """Resample labels when clustering is combined with exact zeroing."""
    workspace = label_workspace(dataset, basis, state.free_coef)
    return _sweep_labels(workspace, state.labels, state.lambda_cluster,
                         state.tau, state.alpha, prior, rng)


def update_labels_pm(state, dataset, basis, prior, rng):
    """Resample per-predictor inclusion under the point-mass-only prior."""
    workspace = label_workspace(dataset, basis, state.free_coef)
    return _sweep_labels(workspace, state.labels, state.lambda_cluster,
                         state.tau, state.alpha, prior, rng)


def _draw_gaussian(precision, linear, rng):
    """Draw from N(precision^-1 linear, precision^-1) via Cholesky."""
    chol = np.linalg.cholesky(precision)
    mean = solve_triangular(
        chol.T, solve_triangular(chol, linear, lower=True), lower=False)
    noise = solve_triangular(chol.T, rng.standard_normal(linear.size),
                             lower=False)
    return mean + noise


def update_coefficients(state, dataset, basis, which, rng):
    """Draw free or cluster basis coefficients from their full conditional.

    Returns the new coefficient matrix without touching the state. The
    cluster draw trusts state.labels and state.lambda_cluster (the
    coefficient matrix itself may have a stale column count right after a
    label sweep); with zero non-null clusters it returns an empty matrix.
    """
    m = basis.num_basis
    if which == "clustered":
        k = int(np.asarray(state.lambda_cluster).size)
        if k == 0:
            return np.zeros((m, 0))
        workspace = label_workspace(dataset, basis, state.free_coef)
        s, g = _cluster_gram(workspace, state.labels, k)
        precision = state.tau * np.kron(s, workspace.gram)
        for j in range(k):
            block = slice(j * m, (j + 1) * m)
            precision[block, block] += state.lambda_cluster[j] * basis.penalty
        draw = _draw_gaussian(precision, state.tau * g, rng)
        return draw.reshape((m, k), order="F")
    if which == "free":
        k = state.cluster_coef.shape[1]
        member = membership_matrix(state.labels, k)
        fitted = (basis.theta @ state.cluster_coef
                  @ (dataset.clusterable @ member).T)
        resid = dataset.response.T - fitted
        g = np.ravel(basis.theta.T @ resid @ dataset.free, order="F")
        precision = state.tau * np.kron(dataset.free.T @ dataset.free,
                                        basis.gram)
        for j in range(dataset.n_free):
            block = slice(j * m, (j + 1) * m)
            precision[block, block] += state.lambda_free[j] * basis.penalty
        draw = _draw_gaussian(precision, state.tau * g, rng)
        return draw.reshape((m, dataset.n_free), order="F")
    raise ValueError("which must be 'free' or 'clustered'")


def update_precisions(state, dataset, basis, prior, rng):
    """Gamma draws for the smoothing precisions and the error precision."""
    m = basis.num_basis
    lambda_free = np.empty(dataset.n_free)
    for j in range(dataset.n_free):
        coef = state.free_coef[:, j]
        quad = float(coef @ basis.penalty @ coef)
        lambda_free[j] = rng.gamma(prior.a_lambda + 0.5 * m,
                                   1.0 / (prior.b_lambda + 0.5 * quad))
    k = state.cluster_coef.shape[1]
    lambda_cluster = np.empty(k)
    for j in range(k):
        coef = state.cluster_coef[:, j]
        quad = float(coef @ basis.penalty @ coef)
        lambda_cluster[j] = rng.gamma(prior.a_lambda + 0.5 * m,
                                      1.0 / (prior.b_lambda + 0.5 * quad))
    member = membership_matrix(state.labels, k)
    fitted = (basis.theta @ state.free_coef @ dataset.free.T
              + basis.theta @ state.cluster_coef
              @ (dataset.clusterable @ member).T)
    rss = float(np.sum((dataset.response.T - fitted) ** 2))
    tau = rng.gamma(prior.a_tau + 0.5 * dataset.response.size,
                    1.0 / (prior.b_tau + 0.5 * rss))
    return lambda_free, lambda_cluster, tau


def update_alpha(num_clusters, n_items, alpha, prior, rng):
    """Resample the concentration parameter by the auxiliary-beta scheme.

    num_clusters and n_items describe the current partition of the
    predictors the clustering prior governs; alpha is the current value,
    needed for the auxiliary Beta draw.
    """
    if n_items < 1 or num_clusters < 1:
        raise ValueError("need at least one clustered item")
    if num_clusters > n_items:
        raise ValueError("cluster count cannot exceed item count")
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    u = rng.beta(alpha + 1.0, float(n_items))
    rate = prior.alpha_rate - np.log(u)
    odds = (prior.alpha_shape + num_clusters - 1.0) / (n_items * rate)
    if rng.random() < odds / (1.0 + odds):
        return rng.gamma(prior.alpha_shape + num_clusters, 1.0 / rate)
    return rng.gamma(prior.alpha_shape + num_clusters - 1.0, 1.0 / rate)


def initial_state(dataset, prior):
    """Deterministic starting point: every predictor in its own cluster."""
    m = prior.num_basis
    p_c = dataset.n_clusterable
    variance = float(np.var(dataset.response))
    return ModelState(
        free_coef=np.zeros((m, dataset.n_free)),
        cluster_coef=np.zeros((m, p_c)),
        labels=np.arange(1, p_c + 1),
        lambda_free=np.ones(dataset.n_free),
        lambda_cluster=np.ones(p_c),
        tau=1.0 / max(variance, 1e-12),
        alpha=prior.alpha_shape / prior.alpha_rate,
        iteration=0,
    )


def gibbs_update(state, dataset, basis, prior, rng):
    """Advance the state by one full Gibbs cycle, in place."""
    if prior.variant == "fosr-dp":
        state.labels, state.lambda_cluster = update_labels_dp(
            state, dataset, basis, prior, rng)
    elif prior.variant == "fosr-dppm":
        state.labels, state.lambda_cluster = update_labels_dppm(
            state, dataset, basis, prior, rng)
    elif prior.variant == "fosr-pm":
        state.labels, state.lambda_cluster = update_labels_pm(
            state, dataset, basis, prior, rng)
    state.cluster_coef = update_coefficients(
        state, dataset, basis, "clustered", rng)
    state.free_coef = update_coefficients(state, dataset, basis, "free", rng)
    state.lambda_free, state.lambda_cluster, state.tau = update_precisions(
        state, dataset, basis, prior, rng)
    if prior.updates_alpha:
        n_items = int(np.sum(state.labels > 0))
        if n_items >= 1:
            state.alpha = update_alpha(state.num_clusters, n_items,
                                       state.alpha, prior, rng)
    state.iteration += 1
    return state


@dataclass
class ChainOutput:
    """Post-burn-in draws plus enough metadata to reproduce the run.

    Curves are stored already multiplied through the basis, one (T, P)
    matrix per draw per predictor group; null-cluster predictors
    contribute zero columns and carry NaN smoothing precisions.
    """

    free_curves: np.ndarray      # (draws, T, P_f)
    cluster_curves: np.ndarray   # (draws, T, P_c)
    labels: np.ndarray           # (draws, P_c)
    lambda_free: np.ndarray      # (draws, P_f)
    lambda_cluster: np.ndarray   # (draws, P_c), NaN where label is 0
    tau: np.ndarray              # (draws,)
    alpha: np.ndarray            # (draws,)
    grid: np.ndarray
    seed: object
    variant: str
    iterations: int
    burn_in: int
    prior: object
    runtime_seconds: float

    @property
    def stored_draws(self):
        return self.tau.size


def run_chain(dataset, prior, iterations, burn_in, seed):
    """Run one chain and collect its post-burn-in draws.

    Deterministic given the seed. Numerical failures abort the chain with
    the failing iteration attached to the error.
    """
    if burn_in < 0 or iterations <= burn_in:
        raise ValueError("need iterations > burn_in >= 0")
    started = time.perf_counter()
    basis = make_basis(dataset.grid, prior.num_basis, prior.degree, prior.mix)
    rng = np.random.default_rng(seed)
    state = initial_state(dataset, prior)
    draws = iterations - burn_in
    t, p_f, p_c = dataset.n_points, dataset.n_free, dataset.n_clusterable
    out = ChainOutput(
        free_curves=np.empty((draws, t, p_f)),
        cluster_curves=np.empty((draws, t, p_c)),
        labels=np.empty((draws, p_c), dtype=int),
        lambda_free=np.empty((draws, p_f)),
        lambda_cluster=np.empty((draws, p_c)),
        tau=np.empty(draws),
        alpha=np.empty(draws),
        grid=dataset.grid.copy(),
        seed=seed,
        variant=prior.variant,
        iterations=iterations,
        burn_in=burn_in,
        prior=prior,
        runtime_seconds=0.0,
    )
    for it in range(iterations):
        try:
            gibbs_update(state, dataset, basis, prior, rng)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise ChainError(f"iteration {it}: {exc}") from exc
        if it < burn_in:
            continue
        idx = it - burn_in
        member = membership_matrix(state.labels, state.num_clusters)
        out.free_curves[idx] = basis.theta @ state.free_coef
        out.cluster_curves[idx] = basis.theta @ state.cluster_coef @ member.T
        out.labels[idx] = state.labels
        out.lambda_free[idx] = state.lambda_free
        nonzero = state.labels > 0
        if state.num_clusters:
            per_pred = state.lambda_cluster[np.maximum(state.labels - 1, 0)]
            out.lambda_cluster[idx] = np.where(nonzero, per_pred, np.nan)
        else:
            out.lambda_cluster[idx] = np.nan
        out.tau[idx] = state.tau
        out.alpha[idx] = state.alpha
    out.runtime_seconds = time.perf_counter() - started
    return out
