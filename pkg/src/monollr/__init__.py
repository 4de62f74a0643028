"""Monotone-corrected local linear estimation of conditional distributions."""

from .errors import (
    AllCandidatesInfeasible,
    DegenerateGrid,
    DegenerateWeights,
    EstimationError,
    NearSingularNormalization,
    OutOfGridRange,
)
from .kernels import (
    KERNEL_FAMILIES,
    WEIGHT_MODES,
    SmoothingKernelPair,
    WeightVector,
    kernel_eval,
    local_weights,
    smoothing_pair,
)
from .estimators import (
    DEFAULT_GRID_COUNT,
    PREDICT_METHODS,
    WINDOW_MODES,
    DistributionEstimate,
    EstimatorConfig,
    GridSpec,
    RegressionSample,
    cdf_smooth,
    cdf_step,
    default_grid,
    ll_density,
    ll_mean,
    monotone_cdf,
    monotone_density,
    nw_mean,
    point_predict,
    quantile,
    smooth_cdf_estimate,
)
from .bandwidth import CvConfig, CvResult, secondary_bandwidth, select_bandwidth
from .bootstrap import BootstrapSummary, lmf_bootstrap
from .simulation import (
    DgpSpec,
    EvalPoint,
    ExperimentConfig,
    ExperimentReport,
    generate,
    ks_statistic,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AllCandidatesInfeasible",
    "BootstrapSummary",
    "CvConfig",
    "CvResult",
    "DEFAULT_GRID_COUNT",
    "DegenerateGrid",
    "DegenerateWeights",
    "DgpSpec",
    "DistributionEstimate",
    "EstimationError",
    "EstimatorConfig",
    "EvalPoint",
    "ExperimentConfig",
    "ExperimentReport",
    "GridSpec",
    "KERNEL_FAMILIES",
    "NearSingularNormalization",
    "OutOfGridRange",
    "PREDICT_METHODS",
    "RegressionSample",
    "SmoothingKernelPair",
    "WEIGHT_MODES",
    "WINDOW_MODES",
    "WeightVector",
    "cdf_smooth",
    "cdf_step",
    "default_grid",
    "generate",
    "kernel_eval",
    "ks_statistic",
    "ll_density",
    "ll_mean",
    "lmf_bootstrap",
    "local_weights",
    "monotone_cdf",
    "monotone_density",
    "nw_mean",
    "point_predict",
    "quantile",
    "run_experiment",
    "secondary_bandwidth",
    "select_bandwidth",
    "smooth_cdf_estimate",
    "smoothing_pair",
]
