"""Sample-size planning for medical machine-learning studies.

Size the testing set for the metrics you want to estimate, derive the
training and total sizes from the split, and check the plan by simulation.
"""

__version__ = "0.1.0"

from .design import StudyDesign, parse_config
from .errors import DesignError, SizingError
from .mc_verifier import CIMethod, PrevalenceMode, SimulationConfig, coverage_check, simulate_study
from .metric_sizing import (
    MetricKind,
    MetricRequirement,
    MetricTarget,
    n_events_for_proportion,
    n_test_for_mean,
    n_test_for_multiclass,
    n_test_for_sensitivity,
    n_test_for_specificity,
    required_test_size,
)
from .report import SweepGrid, render_report, run_size, run_sweep
from .split_planner import SizingResult, SplitSpec, apply_dropout, plan_split
from .stats_kernel import ConfidenceSpec, normal_cdf, normal_quantile, wald_half_width, wilson_interval

__all__ = [
    "__version__",
    "CIMethod",
    "ConfidenceSpec",
    "DesignError",
    "MetricKind",
    "MetricRequirement",
    "MetricTarget",
    "PrevalenceMode",
    "SimulationConfig",
    "SizingError",
    "SizingResult",
    "SplitSpec",
    "StudyDesign",
    "SweepGrid",
    "apply_dropout",
    "coverage_check",
    "n_events_for_proportion",
    "n_test_for_mean",
    "n_test_for_multiclass",
    "n_test_for_sensitivity",
    "n_test_for_specificity",
    "normal_cdf",
    "normal_quantile",
    "parse_config",
    "plan_split",
    "render_report",
    "required_test_size",
    "run_size",
    "run_sweep",
    "simulate_study",
    "wald_half_width",
    "wilson_interval",
]
