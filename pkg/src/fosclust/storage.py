"""File formats: dataset CSVs, chain draws, reports, and manifests.

Everything is plain UTF-8 CSV with a header row, floats written with
repr() so values round-trip exactly and reruns are byte-identical. Wall
clock timings live in their own file (timings.json) because every other
artifact is required to be bitwise reproducible under a fixed seed.

Dataset schema: Y.csv holds one response row per subject, its header is
the grid; X.csv and W.csv hold the predictors with name headers. W.csv
never contains the intercept column; readers prepend it unless told not
to.
"""

import json
from pathlib import Path

import numpy as np

from .evaluation import (coclustering_matrix, curve_summary, dendrogram,
                         percent_zero)
from .model import FunctionalDataset


def _fmt(value):
    return repr(float(value))


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def _float_rows(matrix):
    return ([_fmt(v) for v in row] for row in np.atleast_2d(matrix))


def predictor_names(n, prefix):
    return [f"{prefix}{i + 1}" for i in range(n)]


def write_dataset(directory, dataset, truth=None, extra_meta=None):
    """Write a dataset (and optional truth) to its CSV schema.

    Returns the list of written paths. The intercept column is stripped
    from W on the way out; read_dataset adds it back.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if not np.all(dataset.free[:, 0] == 1.0):
        raise ValueError("first free column must be the all-ones intercept")
    paths = []
    paths.append(_write_csv(directory / "Y.csv",
                            [_fmt(g) for g in dataset.grid],
                            _float_rows(dataset.response)))
    x_names = predictor_names(dataset.n_clusterable, "x")
    paths.append(_write_csv(directory / "X.csv", x_names,
                            _float_rows(dataset.clusterable)))
    w_names = predictor_names(dataset.n_free - 1, "w")
    paths.append(_write_csv(directory / "W.csv", w_names,
                            _float_rows(dataset.free[:, 1:])))
    if truth is not None:
        paths.append(_write_csv(
            directory / "truth_cluster_curves.csv", ["grid"] + x_names,
            ([_fmt(g)] + [_fmt(v) for v in row]
             for g, row in zip(dataset.grid, truth.cluster_curves))))
        paths.append(_write_csv(
            directory / "truth_free_curves.csv",
            ["grid", "intercept"] + w_names,
            ([_fmt(g)] + [_fmt(v) for v in row]
             for g, row in zip(dataset.grid, truth.free_curves))))
        paths.append(_write_csv(
            directory / "truth_labels.csv", ["predictor", "label"],
            ([name, str(int(lab))]
             for name, lab in zip(x_names, truth.labels))))
        meta = {"sigma2": float(truth.sigma2)}
        if extra_meta:
            meta.update(extra_meta)
        path = directory / "truth_meta.json"
        path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        paths.append(path)
    return paths


def _read_csv(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing input file: {path}")
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    body = [line.split(",") for line in lines[1:]]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(
                f"{path}: row {i + 1} has {len(row)} fields, "
                f"header has {len(header)}")
    return header, body


def read_dataset(y_path, x_path, w_path, add_intercept=True):
    """Load a dataset from the CSV schema written by write_dataset."""
    y_header, y_rows = _read_csv(y_path)
    grid = np.array([float(v) for v in y_header])
    response = np.array([[float(v) for v in row] for row in y_rows])
    _, x_rows = _read_csv(x_path)
    clusterable = np.array([[float(v) for v in row] for row in x_rows])
    _, w_rows = _read_csv(w_path)
    free = np.array([[float(v) for v in row] for row in w_rows])
    if free.size == 0:
        free = np.empty((len(w_rows), 0))
    if add_intercept:
        free = np.column_stack([np.ones(free.shape[0]), free])
    if clusterable.shape[0] != response.shape[0] \
            or free.shape[0] != response.shape[0]:
        raise ValueError(
            f"row counts differ: Y has {response.shape[0]}, "
            f"X has {clusterable.shape[0]}, W has {free.shape[0]}")
    return FunctionalDataset(response=response, free=free,
                             clusterable=clusterable, grid=grid)


def standardize_predictors(dataset, intercept=True):
    """Center and scale predictor columns, leaving any intercept alone.

    With intercept=True the first free column is assumed to be the
    all-ones intercept and is skipped. Constant columns are centered but
    not scaled.
    """

    def scaled(matrix):
        matrix = matrix - matrix.mean(axis=0)
        spread = matrix.std(axis=0)
        spread[spread == 0] = 1.0
        return matrix / spread

    free = dataset.free.copy()
    start = 1 if intercept else 0
    if free.shape[1] > start:
        free[:, start:] = scaled(free[:, start:])
    return FunctionalDataset(response=dataset.response, free=free,
                             clusterable=scaled(dataset.clusterable),
                             grid=dataset.grid)


def _curve_columns(names, n_points):
    return [f"{name}_t{j}" for name in names for j in range(n_points)]


def write_chain(directory, output):
    """Write one chain's stored draws, one file per tracked quantity."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    draws = output.stored_draws
    t = output.grid.size
    p_f = output.free_curves.shape[2]
    p_c = output.cluster_curves.shape[2]
    free_names = ["intercept"] + predictor_names(p_f - 1, "w")
    x_names = predictor_names(p_c, "x")
    prior = output.prior
    paths = []

    paths.append(_write_csv(directory / "chain_tau.csv", ["tau"],
                            ([_fmt(v)] for v in output.tau)))
    if prior.updates_alpha:
        paths.append(_write_csv(directory / "chain_alpha.csv", ["alpha"],
                                ([_fmt(v)] for v in output.alpha)))
    if prior.clusters or prior.selects:
        paths.append(_write_csv(directory / "chain_labels.csv", x_names,
                                ([str(int(v)) for v in row]
                                 for row in output.labels)))
    paths.append(_write_csv(directory / "chain_lambda_free.csv", free_names,
                            _float_rows(output.lambda_free)))
    paths.append(_write_csv(directory / "chain_lambda_cluster.csv", x_names,
                            _float_rows(output.lambda_cluster)))
    free_flat = output.free_curves.transpose(0, 2, 1).reshape(draws, p_f * t)
    cluster_flat = output.cluster_curves.transpose(0, 2, 1) \
        .reshape(draws, p_c * t)
    paths.append(_write_csv(
        directory / "chain_free_curves.csv", _curve_columns(free_names, t),
        _float_rows(free_flat)))
    paths.append(_write_csv(
        directory / "chain_cluster_curves.csv", _curve_columns(x_names, t),
        _float_rows(cluster_flat)))

    meta = {
        "variant": output.variant,
        "seed": str(output.seed),
        "iterations": int(output.iterations),
        "burn_in": int(output.burn_in),
        "stored_draws": int(draws),
        "grid": [float(g) for g in output.grid],
        "prior": {
            "variant": prior.variant,
            "a_lambda": prior.a_lambda, "b_lambda": prior.b_lambda,
            "a_tau": prior.a_tau, "b_tau": prior.b_tau,
            "alpha_shape": prior.alpha_shape, "alpha_rate": prior.alpha_rate,
            "alpha0": prior.alpha0, "num_basis": prior.num_basis,
            "mix": prior.mix, "degree": prior.degree,
        },
    }
    meta_path = directory / "metadata.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    paths.append(meta_path)
    timing_path = directory / "timings.json"
    timing_path.write_text(json.dumps(
        {"runtime_seconds": output.runtime_seconds}) + "\n",
        encoding="utf-8")
    paths.append(timing_path)
    return paths


def write_fit_report(directory, output):
    """Write posterior summaries: curve bands plus clustering artifacts."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    t = output.grid.size
    p_f = output.free_curves.shape[2]
    p_c = output.cluster_curves.shape[2]
    free_names = ["intercept"] + predictor_names(p_f - 1, "w")
    x_names = predictor_names(p_c, "x")
    prior = output.prior
    paths = []

    def summary_rows(curves, names):
        for j, name in enumerate(names):
            mean, lo, hi = curve_summary(curves[:, :, j])
            for k in range(t):
                yield [name, _fmt(output.grid[k]), _fmt(mean[k]),
                       _fmt(lo[k]), _fmt(hi[k])]

    header = ["predictor", "grid", "mean", "lower", "upper"]
    paths.append(_write_csv(directory / "free_curve_summary.csv", header,
                            summary_rows(output.free_curves, free_names)))
    paths.append(_write_csv(directory / "cluster_curve_summary.csv", header,
                            summary_rows(output.cluster_curves, x_names)))

    if prior.clusters or prior.selects:
        co = coclustering_matrix(output.labels)
        paths.append(_write_csv(
            directory / "coclustering.csv", ["predictor"] + x_names,
            ([x_names[i]] + [_fmt(v) for v in row]
             for i, row in enumerate(co))))
        if p_c >= 2:
            merges = dendrogram(co)
            paths.append(_write_csv(
                directory / "dendrogram.csv",
                ["step", "left", "right", "height", "size"],
                ([str(s), str(int(row[0])), str(int(row[1])),
                  _fmt(row[2]), str(int(row[3]))]
                 for s, row in enumerate(merges))))
    if prior.selects:
        fractions = percent_zero(output.labels)
        paths.append(_write_csv(
            directory / "percent_zero.csv", ["predictor", "fraction_zero"],
            ([name, _fmt(v)] for name, v in zip(x_names, fractions))))
    return paths


def write_study_tables(directory, rows, per_predictor_zero, failures):
    """Write the study's tidy metrics plus wide benchmark-style tables.

    rows come from aggregate_study; cells missing there (too few finished
    replicates) appear with blank mean/se fields in the wide tables.
    per_predictor_zero rows are (design, N, variant, predictor, mean).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    paths.append(_write_csv(
        directory / "study_metrics.csv",
        ["design_id", "n_subjects", "variant", "metric", "mean", "se",
         "n_replicates"],
        ([str(r["design_id"]), str(r["n_subjects"]), r["variant"],
          r["metric"], _fmt(r["mean"]), _fmt(r["se"]),
          str(r["n_replicates"])] for r in rows)))

    cells = {}
    variants = []
    for r in rows:
        key = (r["design_id"], r["n_subjects"])
        cells.setdefault(key, {})[(r["variant"], r["metric"])] = r
        if r["variant"] not in variants:
            variants.append(r["variant"])
    variants.sort()

    def wide_table(name, metrics):
        header = ["design_id", "n_subjects"]
        for variant in variants:
            for metric in metrics:
                header += [f"{variant}_{metric}_mean", f"{variant}_{metric}_se"]
        body = []
        for key in sorted(cells):
            row = [str(key[0]), str(key[1])]
            for variant in variants:
                for metric in metrics:
                    cell = cells[key].get((variant, metric))
                    if cell is None:
                        row += ["", ""]
                    else:
                        row += [_fmt(cell["mean"]), _fmt(cell["se"])]
            body.append(row)
        return _write_csv(directory / name, header, body)

    paths.append(wide_table("table_mse.csv", ["pointwise_mse"]))
    paths.append(wide_table("table_clustering.csv",
                            ["rand", "adjusted_rand"]))
    if per_predictor_zero:
        paths.append(_write_csv(
            directory / "study_percent_zero.csv",
            ["design_id", "n_subjects", "variant", "predictor",
             "mean_fraction_zero"],
            ([str(d), str(n), v, pred, _fmt(frac)]
             for d, n, v, pred, frac in per_predictor_zero)))
    if failures:
        paths.append(_write_csv(
            directory / "failures.csv",
            ["design_id", "n_subjects", "variant", "replicate_id", "error"],
            ([str(f["design_id"]), str(f["n_subjects"]), f["variant"],
              str(f["replicate_id"]), f["error"].replace(",", ";")]
             for f in failures)))
    return paths


def write_manifest(directory, paths):
    """Record every artifact of a run, relative to the run directory."""
    directory = Path(directory)
    names = sorted(str(Path(p).relative_to(directory)) for p in paths)
    path = directory / "manifest.json"
    path.write_text(json.dumps({"files": names}, indent=2) + "\n",
                    encoding="utf-8")
    return path
