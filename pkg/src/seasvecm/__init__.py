"""Bayesian analysis of seasonally cointegrated VAR models on quarterly data.

The package estimates vector error-correction models that allow
cointegration at the zero, bi-annual and annual frequencies of quarterly
series: a Gibbs sampler for the posterior of all parameters, projector
based point estimates of the cointegrating spaces, and marginal-data-
density comparison across deterministic-term cases, seasonal dummies and
rank triples.
"""

from .compare import (
    ModelGrid,
    ModelScore,
    compare_models,
    conditional_log_mdd,
    enumerate_grid,
    estimate_log_mdd,
    feature_marginals,
    model_posteriors,
    score_model,
    truncation_fraction,
)
from .dgp import DgpConfig, default_config, simulate, simulate_from_state
from .errors import ChainError, ConfigError, ConvergenceError, NumericalError
from .estimators import SeasonalModelComparison, SeasonalVECM
from .gibbs import ChainOutput, gibbs_sweep, run_chain
from .linalg import (
    CompanionMatrix,
    StabilityReport,
    build_companion,
    hermitian_sqrt,
    normalize_pair,
    stability_check,
)
from .pipeline import (
    DesignMatrices,
    ModelSpec,
    QuarterlySeries,
    build_design,
    read_csv,
    write_csv,
)
from .priors import ParamState, PriorHyper, log_prior_density_B_nu, sample_prior_state
from .subspace import (
    SpaceSummary,
    mean_projector,
    point_estimate,
    space_distance,
    span_projector,
    span_variation,
    summarize_draws,
)

__version__ = "0.1.0"

__all__ = [
    "ChainError",
    "ChainOutput",
    "CompanionMatrix",
    "ConfigError",
    "ConvergenceError",
    "DesignMatrices",
    "DgpConfig",
    "ModelGrid",
    "ModelScore",
    "ModelSpec",
    "NumericalError",
    "ParamState",
    "PriorHyper",
    "QuarterlySeries",
    "SeasonalModelComparison",
    "SeasonalVECM",
    "SpaceSummary",
    "StabilityReport",
    "build_companion",
    "build_design",
    "compare_models",
    "conditional_log_mdd",
    "default_config",
    "enumerate_grid",
    "estimate_log_mdd",
    "feature_marginals",
    "gibbs_sweep",
    "hermitian_sqrt",
    "log_prior_density_B_nu",
    "mean_projector",
    "model_posteriors",
    "normalize_pair",
    "point_estimate",
    "read_csv",
    "run_chain",
    "sample_prior_state",
    "score_model",
    "simulate",
    "simulate_from_state",
    "space_distance",
    "span_projector",
    "span_variation",
    "stability_check",
    "summarize_draws",
    "truncation_fraction",
    "write_csv",
]
