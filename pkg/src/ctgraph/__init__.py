"""Continuous-time dependency-graph recovery from multivariate time series.

Fits sparsity-regularized neural vector fields through an ODE solver to
recover which coordinates of a dynamical system drive which, from regularly
or irregularly sampled data, plus benchmark systems, a spline-collocation
baseline, edge-recovery metrics, and an experiment harness.
"""

__version__ = "0.1.0"

from .discretization import (
    discretization_demo,
    first_sign_flip,
    matrix_exponential,
    proposition1_check,
)
from .dcm import fit_dcm
from .field import StructuredMLP, load_field, save_field
from .metrics import auc, confusion_counts, f1_score, max_f1_threshold, tpr_fdr
from .ode import SolverConfig, Trajectory, euler_maruyama, ode_solve, ode_solve_with_grad
from .sparsity import (
    PenaltyConfig,
    adaptive_weights_from,
    penalty_value,
    prox_group_soft_threshold,
    prox_soft_threshold,
)
from .spline import SmoothingSpline, fit_spline
from .systems import (
    ObservationScheme,
    SdeSystem,
    generate_dataset,
    glycolysis,
    ground_truth_check,
    lorenz96,
    make_system,
    rossler_generalized,
    synthetic_nn_system,
)
from .training import (
    TimeSeries,
    TrainConfig,
    TrainedModel,
    extract_graph,
    fit_ngm,
    fit_penalized,
    normalize_timeseries,
    predict_trajectory,
    trajectory_loss,
)
from .experiments import ExperimentConfig, run_experiment

__all__ = [
    "ExperimentConfig",
    "ObservationScheme",
    "PenaltyConfig",
    "SdeSystem",
    "SmoothingSpline",
    "SolverConfig",
    "StructuredMLP",
    "TimeSeries",
    "TrainConfig",
    "TrainedModel",
    "Trajectory",
    "adaptive_weights_from",
    "auc",
    "confusion_counts",
    "discretization_demo",
    "euler_maruyama",
    "extract_graph",
    "f1_score",
    "first_sign_flip",
    "fit_dcm",
    "fit_ngm",
    "fit_penalized",
    "fit_spline",
    "generate_dataset",
    "glycolysis",
    "ground_truth_check",
    "load_field",
    "lorenz96",
    "make_system",
    "matrix_exponential",
    "max_f1_threshold",
    "normalize_timeseries",
    "ode_solve",
    "ode_solve_with_grad",
    "penalty_value",
    "predict_trajectory",
    "prox_group_soft_threshold",
    "prox_soft_threshold",
    "proposition1_check",
    "rossler_generalized",
    "run_experiment",
    "save_field",
    "synthetic_nn_system",
    "tpr_fdr",
    "trajectory_loss",
]
