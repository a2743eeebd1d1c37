"""Metrics and posterior summaries for fitted chains and studies.

Clustering scores treat the null (zero-effect) label as an ordinary
cluster. Quantiles use the Hazen plotting-position convention (linear
interpolation between order statistics), which the credible-band summaries
document explicitly because tail quantiles from a few thousand draws are
sensitive to the convention.
"""

import numpy as np
from dataclasses import dataclass


def pointwise_mse(estimate, truth):
    """Mean squared error over all grid points and predictors."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError("estimate and truth shapes must match")
    return float(np.mean((estimate - truth) ** 2))


def _contingency(c1, c2):
    c1 = np.asarray(c1).ravel()
    c2 = np.asarray(c2).ravel()
    if c1.size != c2.size:
        raise ValueError("label vectors must have equal length")
    if c1.size < 2:
        raise ValueError("need at least two items")
    _, i1 = np.unique(c1, return_inverse=True)
    _, i2 = np.unique(c2, return_inverse=True)
    table = np.zeros((i1.max() + 1, i2.max() + 1), dtype=np.int64)
    np.add.at(table, (i1, i2), 1)
    return table


def _pairs(counts):
    counts = counts.astype(np.int64)
    return float(np.sum(counts * (counts - 1) // 2))


def rand_index(c1, c2):
    """Fraction of item pairs on which two labelings agree."""
    table = _contingency(c1, c2)
    n = table.sum()
    total = n * (n - 1) / 2
    together = _pairs(table)
    same1 = _pairs(table.sum(axis=1))
    same2 = _pairs(table.sum(axis=0))
    apart = total - same1 - same2 + together
    return float((together + apart) / total)


def adjusted_rand_index(c1, c2):
    """Pair-counting agreement corrected for chance under permutations."""
    table = _contingency(c1, c2)
    n = table.sum()
    total = n * (n - 1) / 2
    together = _pairs(table)
    same1 = _pairs(table.sum(axis=1))
    same2 = _pairs(table.sum(axis=0))
    expected = same1 * same2 / total
    top = (same1 + same2) / 2
    if top == expected:
        return 1.0
    return float((together - expected) / (top - expected))


def coclustering_matrix(label_draws):
    """Per-pair fraction of draws assigning two predictors one label."""
    draws = np.asarray(label_draws)
    if draws.ndim != 2 or draws.shape[0] < 1:
        raise ValueError("label draws must be a nonempty (draws, P) array")
    same = draws[:, :, None] == draws[:, None, :]
    return same.mean(axis=0)


def dendrogram(coclustering):
    """Average-linkage merge tree on dissimilarity 1 - coclustering.

    Returns a (P-1, 4) array with one merge per row: the two merged
    cluster ids (leaves are 0..P-1, the merge at row s creates id P+s),
    the merge height, and the new cluster's leaf count. Ties break toward
    the lexicographically smallest id pair.
    """
    co = np.asarray(coclustering, dtype=float)
    if co.ndim != 2 or co.shape[0] != co.shape[1]:
        raise ValueError("co-clustering matrix must be square")
    if not np.allclose(co, co.T, atol=1e-12):
        raise ValueError("co-clustering matrix must be symmetric")
    p = co.shape[0]
    if p < 2:
        raise ValueError("need at least two predictors")
    total = 2 * p - 1
    dist = np.full((total, total), np.inf)
    dist[:p, :p] = 1.0 - co
    size = np.ones(total)
    active = list(range(p))
    merges = np.empty((p - 1, 4))
    for step in range(p - 1):
        best = None
        for a_pos, i in enumerate(active):
            for j in active[a_pos + 1:]:
                d = dist[i, j]
                if best is None or d < best[0]:
                    best = (d, i, j)
        height, i, j = best
        new = p + step
        for k in active:
            if k in (i, j):
                continue
            merged = (size[i] * dist[i, k] + size[j] * dist[j, k]) \
                / (size[i] + size[j])
            dist[new, k] = dist[k, new] = merged
        size[new] = size[i] + size[j]
        active = [k for k in active if k not in (i, j)] + [new]
        merges[step] = (i, j, height, size[new])
    return merges


def percent_zero(label_draws):
    """Per-predictor fraction of draws assigning the null label."""
    draws = np.asarray(label_draws)
    if draws.ndim != 2 or draws.shape[0] < 1:
        raise ValueError("label draws must be a nonempty (draws, P) array")
    return (draws == 0).mean(axis=0)


def curve_summary(curve_draws, lower=0.025, upper=0.975):
    """Pointwise posterior mean and credible band of one curve.

    Needs at least 40 draws so the default 2.5 percent tails rest on
    actual order statistics.
    """
    draws = np.atleast_2d(np.asarray(curve_draws, dtype=float))
    if draws.shape[0] < 40:
        raise ValueError("need at least 40 draws for tail quantiles")
    mean = draws.mean(axis=0)
    lo, hi = np.quantile(draws, [lower, upper], axis=0, method="hazen")
    return mean, lo, hi


@dataclass
class EvaluationReport:
    """Metrics of one fitted chain against its generating truth."""

    replicate_id: int
    design_id: int
    n_subjects: int
    variant: str
    pointwise_mse: float
    rand: float
    adjusted_rand: float
    percent_zero: np.ndarray
    coclustering: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.rand <= 1.0:
            raise ValueError("rand index must lie in [0, 1]")
        if self.adjusted_rand > 1.0 + 1e-12:
            raise ValueError("adjusted rand index cannot exceed 1")


def evaluate_chain(output, truth, replicate_id, design_id, n_subjects):
    """Score one chain's stored draws against the simulation truth.

    Clustering scores are averaged over stored draws rather than computed
    from a single point-estimate partition.
    """
    estimate = output.cluster_curves.mean(axis=0)
    mse = pointwise_mse(estimate, truth.cluster_curves)
    rand_vals = np.fromiter(
        (rand_index(row, truth.labels) for row in output.labels),
        dtype=float, count=output.labels.shape[0])
    ari_vals = np.fromiter(
        (adjusted_rand_index(row, truth.labels) for row in output.labels),
        dtype=float, count=output.labels.shape[0])
    return EvaluationReport(
        replicate_id=replicate_id,
        design_id=design_id,
        n_subjects=n_subjects,
        variant=output.variant,
        pointwise_mse=mse,
        rand=float(rand_vals.mean()),
        adjusted_rand=float(ari_vals.mean()),
        percent_zero=percent_zero(output.labels),
        coclustering=coclustering_matrix(output.labels),
    )


def aggregate_study(reports, bootstrap_reps=100, seed=0):
    """Cell means and bootstrap standard errors across replicates.

    Cells are (design, subject count, variant) combinations; each yields
    one row per metric. The standard error is the standard deviation of
    bootstrap-resampled replicate means.
    """
    if not reports:
        raise ValueError("no reports to aggregate")
    cells = {}
    for rep in reports:
        key = (rep.design_id, rep.n_subjects, rep.variant)
        cells.setdefault(key, []).append(rep)
    rng = np.random.default_rng(seed)
    rows = []
    for key in sorted(cells):
        design_id, n_subjects, variant = key
        group = cells[key]
        if len(group) < 2:
            raise ValueError(
                f"cell {key} needs at least two replicates")
        for metric in ("pointwise_mse", "rand", "adjusted_rand"):
            values = np.array([getattr(rep, metric) for rep in group])
            picks = rng.integers(0, values.size,
                                 size=(bootstrap_reps, values.size))
            boot_means = values[picks].mean(axis=1)
            rows.append({
                "design_id": design_id,
                "n_subjects": n_subjects,
                "variant": variant,
                "metric": metric,
                "mean": float(values.mean()),
                "se": float(np.std(boot_means, ddof=1)),
                "n_replicates": values.size,
            })
    return rows
