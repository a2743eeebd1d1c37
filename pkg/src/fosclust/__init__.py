"""Bayesian function-on-scalar regression with functional effects that can
be selected out, clustered across predictors, and smoothed, under four
priors: plain smoothing (fosr), smoothing with a point mass at the zero
function (fosr-pm), clustered smoothing (fosr-dp), and clustered smoothing
with the point mass (fosr-dppm).
"""

from .basis import BasisSystem, bspline_design, make_basis, pspline_penalty
from .diagnostics import draw_response, geweke_zscores, sample_prior_state
from .evaluation import (EvaluationReport, adjusted_rand_index,
                         aggregate_study, coclustering_matrix, curve_summary,
                         dendrogram, evaluate_chain, percent_zero,
                         pointwise_mse, rand_index)
from .model import (VARIANTS, FunctionalDataset, ModelState, PriorConfig,
                    assemble_design, membership_matrix, one_hot,
                    residual_free)
from .sampler import (ChainError, ChainOutput, LabelUpdateWorkspace,
                      gibbs_update, initial_state, label_workspace,
                      marginal_loglik, normalize_log_weights,
                      null_probability, run_chain, update_alpha,
                      update_coefficients, update_labels_dp,
                      update_labels_dppm, update_labels_pm,
                      update_precisions)
from .simulation import (SimulatedTruth, SimulationSpec, calibrate_noise,
                         draw_noise, fourier_basis, make_design,
                         squared_exp_cov, truth_labels)
from .storage import (read_dataset, standardize_predictors, write_chain,
                      write_dataset, write_fit_report, write_manifest,
                      write_study_tables)
from .study import plan_tasks, run_replicate, run_study, summarize_study

__version__ = "0.1.0"

__all__ = [
    "BasisSystem", "bspline_design", "make_basis", "pspline_penalty",
    "draw_response", "geweke_zscores", "sample_prior_state",
    "EvaluationReport", "adjusted_rand_index", "aggregate_study",
    "coclustering_matrix", "curve_summary", "dendrogram", "evaluate_chain",
    "percent_zero", "pointwise_mse", "rand_index",
    "VARIANTS", "FunctionalDataset", "ModelState", "PriorConfig",
    "assemble_design", "membership_matrix", "one_hot", "residual_free",
    "ChainError", "ChainOutput", "LabelUpdateWorkspace", "gibbs_update",
    "initial_state", "label_workspace", "marginal_loglik",
    "normalize_log_weights", "run_chain", "update_alpha",
    "null_probability",
    "update_coefficients", "update_labels_dp", "update_labels_dppm",
    "update_labels_pm", "update_precisions",
    "SimulatedTruth", "SimulationSpec", "calibrate_noise", "draw_noise",
    "fourier_basis", "make_design", "squared_exp_cov", "truth_labels",
    "read_dataset", "standardize_predictors", "write_chain",
    "write_dataset", "write_fit_report", "write_manifest",
    "write_study_tables",
    "plan_tasks", "run_replicate", "run_study", "summarize_study",
]
