"""Simulation-study orchestration over designs, sizes, and variants.

Every replicate task gets its own seed sequence spawned from the master
seed in a fixed task order, and all variants of a replicate share one
dataset, so results are bitwise reproducible for any worker count and
independent of scheduling. A failed fit is recorded and skipped; the rest
of the study continues.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .evaluation import aggregate_study, evaluate_chain
from .model import PriorConfig
from .sampler import ChainError, run_chain
from .simulation import SimulationSpec, make_design


@dataclass
class StudyTask:
    """One replicate of one (design, size) cell, fitted by every variant."""

    design_id: int
    n_subjects: int
    replicate_id: int
    variants: tuple
    iterations: int
    burn_in: int
    dataset_seed: object
    chain_seeds: dict
    prior_options: dict = field(default_factory=dict)
    sim_options: dict = field(default_factory=dict)


def run_replicate(task):
    """Generate the task's dataset and fit each variant on it."""
    spec = SimulationSpec(design_id=task.design_id,
                          n_subjects=task.n_subjects,
                          seed=task.dataset_seed, **task.sim_options)
    dataset, truth = make_design(spec)
    reports = []
    failures = []
    for variant in task.variants:
        prior = PriorConfig(variant=variant, **task.prior_options)
        try:
            output = run_chain(dataset, prior, task.iterations,
                               task.burn_in, task.chain_seeds[variant])
            reports.append(evaluate_chain(output, truth, task.replicate_id,
                                          task.design_id, task.n_subjects))
        except (ChainError, np.linalg.LinAlgError) as exc:
            failures.append({
                "design_id": task.design_id,
                "n_subjects": task.n_subjects,
                "variant": variant,
                "replicate_id": task.replicate_id,
                "error": str(exc),
            })
    return reports, failures


def plan_tasks(designs, n_values, variants, replicates, iterations, burn_in,
               seed, prior_options=None, sim_options=None):
    """Lay out all replicate tasks with their spawned seeds."""
    if replicates < 2:
        raise ValueError("need at least two replicates per cell")
    designs = sorted(set(designs))
    n_values = sorted(set(n_values))
    variants = tuple(sorted(set(variants)))
    cells = [(d, n, r) for d in designs for n in n_values
             for r in range(replicates)]
    master = np.random.SeedSequence(seed)
    children = master.spawn(len(cells))
    tasks = []
    for (design_id, n_subjects, rep), child in zip(cells, children):
        seeds = child.spawn(len(variants) + 1)
        tasks.append(StudyTask(
            design_id=design_id,
            n_subjects=n_subjects,
            replicate_id=rep,
            variants=variants,
            iterations=iterations,
            burn_in=burn_in,
            dataset_seed=seeds[0],
            chain_seeds=dict(zip(variants, seeds[1:])),
            prior_options=dict(prior_options or {}),
            sim_options=dict(sim_options or {}),
        ))
    return tasks


def run_study(designs, n_values, variants, replicates, iterations, burn_in,
              seed, workers=1, prior_options=None, sim_options=None):
    """Run the full grid; returns (reports, failures) in task order."""
    tasks = plan_tasks(designs, n_values, variants, replicates, iterations,
                       burn_in, seed, prior_options, sim_options)
    if workers < 1:
        raise ValueError("worker count must be at least 1")
    if workers == 1:
        results = [run_replicate(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_replicate, tasks))
    reports = []
    failures = []
    for rep_list, fail_list in results:
        reports.extend(rep_list)
        failures.extend(fail_list)
    return reports, failures


def summarize_study(reports, bootstrap_reps=100, seed=0):
    """Aggregate finished replicates into table rows.

    Cells with fewer than two finished replicates are dropped here (they
    show up as blanks in the wide tables); selection variants additionally
    get per-predictor mean zero fractions.
    """
    cells = {}
    for rep in reports:
        key = (rep.design_id, rep.n_subjects, rep.variant)
        cells.setdefault(key, []).append(rep)
    complete = [rep for key, group in cells.items() if len(group) >= 2
                for rep in group]
    rows = aggregate_study(complete, bootstrap_reps, seed) if complete else []
    per_predictor_zero = []
    for key in sorted(cells):
        design_id, n_subjects, variant = key
        if variant not in ("fosr-pm", "fosr-dppm"):
            continue
        group = cells[key]
        fractions = np.mean([rep.percent_zero for rep in group], axis=0)
        for j, frac in enumerate(fractions):
            per_predictor_zero.append(
                (design_id, n_subjects, variant, f"x{j + 1}", float(frac)))
    return rows, per_predictor_zero
