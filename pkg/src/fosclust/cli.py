"""Command-line entry points: simulate, fit, and study.

Options resolve in three layers: command-line flags override the optional
JSON config file (flat object, keys named like the flags with underscores),
which overrides built-in defaults. Every command writes its artifacts under
one output directory with a manifest, prints the manifest to stdout, and
exits nonzero on any reported error.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .model import PriorConfig, VARIANTS
from .sampler import ChainError, run_chain
from .simulation import SimulationSpec, make_design
from .storage import (read_dataset, standardize_predictors, write_chain,
                      write_dataset, write_fit_report, write_manifest,
                      write_study_tables)
from .study import run_study, summarize_study


@dataclass
class RunConfig:
    """Fully resolved settings shared by the fitting commands."""

    variant: str
    iterations: int
    burn_in: int
    seed: int
    workers: int
    prior: PriorConfig
    out: Path

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ValueError("need iterations > burn_in >= 0")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")


def _load_config(path):
    if path is None:
        return {}
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must hold a flat JSON object")
    return data


def _resolve(args, config, key, default=None, required=False):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if value is None and required:
        raise ValueError(f"missing required option: {key}")
    return value


def _int_list(value):
    parts = value.split(",") if isinstance(value, str) else value
    return [int(str(v).strip()) for v in parts]


def _str_list(value):
    parts = value.split(",") if isinstance(value, str) else value
    return [str(v).strip() for v in parts]


def _prior_options(args, config):
    return {
        "a_lambda": float(_resolve(args, config, "a_lambda", 0.01)),
        "b_lambda": float(_resolve(args, config, "b_lambda", 0.01)),
        "a_tau": float(_resolve(args, config, "a_tau", 0.01)),
        "b_tau": float(_resolve(args, config, "b_tau", 0.01)),
        "alpha_shape": float(_resolve(args, config, "alpha_shape", 1.0)),
        "alpha_rate": float(_resolve(args, config, "alpha_rate", 1.0)),
        "alpha0": float(_resolve(args, config, "alpha0", 2.0)),
        "num_basis": int(_resolve(args, config, "basis_size", 8)),
        "mix": float(_resolve(args, config, "mix", 0.001)),
        "degree": int(_resolve(args, config, "degree", 3)),
    }


def _run_config(args, config, default_workers=1):
    env_workers = os.environ.get("FOSCLUST_WORKERS")
    workers = _resolve(args, config, "workers",
                       int(env_workers) if env_workers else default_workers)
    variant = str(_resolve(args, config, "variant", "fosr-dp"))
    prior = PriorConfig(variant=variant, **_prior_options(args, config))
    return RunConfig(
        variant=variant,
        iterations=int(_resolve(args, config, "iters", 5000)),
        burn_in=int(_resolve(args, config, "burnin", 2500)),
        seed=int(_resolve(args, config, "seed", 0)),
        workers=int(workers),
        prior=prior,
        out=Path(_resolve(args, config, "out", required=True)),
    )


def _finish(out_dir, paths):
    manifest = write_manifest(out_dir, paths)
    for line in json.loads(manifest.read_text(encoding="utf-8"))["files"]:
        print(line)
    print(manifest.name)
    return 0


def cmd_simulate(args):
    config = _load_config(args.config)
    spec = SimulationSpec(
        design_id=int(_resolve(args, config, "design", required=True)),
        n_subjects=int(_resolve(args, config, "n", required=True)),
        n_points=int(_resolve(args, config, "t", 15)),
        n_free=int(_resolve(args, config, "pf", 5)),
        n_clusterable=int(_resolve(args, config, "pc", 15)),
        rho=float(_resolve(args, config, "rho", 0.75)),
        lengthscale=float(_resolve(args, config, "lengthscale", 10.0)),
        target_snr=float(_resolve(args, config, "snr", 1.0)),
        seed=int(_resolve(args, config, "seed", 0)),
    )
    out = Path(_resolve(args, config, "out", required=True))
    dataset, truth = make_design(spec)
    paths = write_dataset(out, dataset, truth,
                          extra_meta={"design_id": spec.design_id,
                                      "seed": spec.seed})
    return _finish(out, paths)


def cmd_fit(args):
    config = _load_config(args.config)
    run = _run_config(args, config)
    data_dir = _resolve(args, config, "data")
    if data_dir is not None:
        base = Path(data_dir)
        y_path, x_path, w_path = (base / "Y.csv", base / "X.csv",
                                  base / "W.csv")
    else:
        y_path = _resolve(args, config, "y", required=True)
        x_path = _resolve(args, config, "x", required=True)
        w_path = _resolve(args, config, "w", required=True)
    add_intercept = not (args.no_intercept
                         or config.get("no_intercept", False))
    dataset = read_dataset(y_path, x_path, w_path,
                           add_intercept=add_intercept)
    standardize = not (args.no_standardize
                       or config.get("standardize") is False)
    if standardize:
        dataset = standardize_predictors(dataset, intercept=add_intercept)
    output = run_chain(dataset, run.prior, run.iterations, run.burn_in,
                       run.seed)
    paths = write_chain(run.out, output)
    paths += write_fit_report(run.out, output)
    return _finish(run.out, paths)


def cmd_study(args):
    config = _load_config(args.config)
    run = _run_config(args, config)
    designs = _int_list(_resolve(args, config, "designs", [1]))
    n_values = _int_list(_resolve(args, config, "n_values", required=True))
    variants = _str_list(_resolve(args, config, "variants", list(VARIANTS)))
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
    replicates = int(_resolve(args, config, "replicates", 20))
    sim_options = {
        "n_points": int(_resolve(args, config, "t", 15)),
        "n_free": int(_resolve(args, config, "pf", 5)),
        "n_clusterable": int(_resolve(args, config, "pc", 15)),
        "rho": float(_resolve(args, config, "rho", 0.75)),
        "lengthscale": float(_resolve(args, config, "lengthscale", 10.0)),
        "target_snr": float(_resolve(args, config, "snr", 1.0)),
    }
    prior_options = _prior_options(args, config)
    bootstrap_reps = int(_resolve(args, config, "bootstrap_reps", 100))
    reports, failures = run_study(
        designs, n_values, variants, replicates, run.iterations,
        run.burn_in, run.seed, workers=run.workers,
        prior_options=prior_options, sim_options=sim_options)
    rows, zero_rows = summarize_study(reports, bootstrap_reps, run.seed)
    paths = write_study_tables(run.out, rows, zero_rows, failures)
    return _finish(run.out, paths)


def _add_common(sub):
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int)


def _add_prior_flags(sub):
    sub.add_argument("--variant", choices=VARIANTS)
    sub.add_argument("--iters", type=int)
    sub.add_argument("--burnin", type=int)
    sub.add_argument("--basis-size", type=int, dest="basis_size")
    sub.add_argument("--mix", type=float)
    sub.add_argument("--degree", type=int)
    sub.add_argument("--a-lambda", type=float, dest="a_lambda")
    sub.add_argument("--b-lambda", type=float, dest="b_lambda")
    sub.add_argument("--a-tau", type=float, dest="a_tau")
    sub.add_argument("--b-tau", type=float, dest="b_tau")
    sub.add_argument("--alpha-shape", type=float, dest="alpha_shape")
    sub.add_argument("--alpha-rate", type=float, dest="alpha_rate")
    sub.add_argument("--alpha0", type=float)


def _add_sim_flags(sub):
    sub.add_argument("--t", type=int)
    sub.add_argument("--pf", type=int)
    sub.add_argument("--pc", type=int)
    sub.add_argument("--rho", type=float)
    sub.add_argument("--lengthscale", type=float)
    sub.add_argument("--snr", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fosclust",
        description="Function-on-scalar regression with clustered, "
                    "selectable, smooth functional effects")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate",
                              help="generate one synthetic dataset")
    sim.add_argument("--design", type=int)
    sim.add_argument("--n", type=int)
    _add_sim_flags(sim)
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    fit = commands.add_parser("fit", help="run one chain on a dataset")
    fit.add_argument("--data", help="directory holding Y.csv, X.csv, W.csv")
    fit.add_argument("--y", help="response CSV path")
    fit.add_argument("--x", help="clusterable predictor CSV path")
    fit.add_argument("--w", help="free predictor CSV path")
    fit.add_argument("--no-intercept", action="store_true",
                     dest="no_intercept",
                     help="do not prepend an intercept column to W")
    fit.add_argument("--no-standardize", action="store_true",
                     dest="no_standardize",
                     help="skip centering and scaling of predictors")
    _add_prior_flags(fit)
    _add_common(fit)
    fit.set_defaults(func=cmd_fit)

    study = commands.add_parser(
        "study", help="run the replicated simulation study grid")
    study.add_argument("--designs", help="comma-separated design ids")
    study.add_argument("--n-values", dest="n_values",
                       help="comma-separated subject counts")
    study.add_argument("--variants", help="comma-separated variant names")
    study.add_argument("--replicates", type=int)
    study.add_argument("--workers", type=int,
                       help="worker processes (default: FOSCLUST_WORKERS "
                            "or 1)")
    study.add_argument("--bootstrap-reps", type=int, dest="bootstrap_reps")
    _add_sim_flags(study)
    _add_prior_flags(study)
    _add_common(study)
    study.set_defaults(func=cmd_study)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, ChainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
