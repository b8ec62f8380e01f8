"""Gaussian finite mixture modelling: parameterized covariances, EM, BIC."""

from .bestfit import NoViableModelError, best_bic, best_fit
from .covariance import (
    EmptyComponentError,
    ModelError,
    MULTIVARIATE_MODELS,
    SingularCovarianceError,
    UNIVARIATE_MODELS,
    constraint_violation,
    estimate_covariances,
    is_univariate,
    n_params,
    validate_model,
)
from .em import (
    FitOptions,
    FitResult,
    MixtureParams,
    bic,
    e_step,
    em_fit,
    log_density,
    m_step,
    one_hot,
)
from .hierarchy import HC_CRITERIA, MergeTree, extend_partition, hclust_init

__all__ = [
    "EmptyComponentError",
    "FitOptions",
    "FitResult",
    "HC_CRITERIA",
    "MergeTree",
    "MixtureParams",
    "ModelError",
    "MULTIVARIATE_MODELS",
    "NoViableModelError",
    "SingularCovarianceError",
    "UNIVARIATE_MODELS",
    "best_bic",
    "best_fit",
    "bic",
    "constraint_violation",
    "e_step",
    "em_fit",
    "estimate_covariances",
    "extend_partition",
    "hclust_init",
    "is_univariate",
    "log_density",
    "m_step",
    "n_params",
    "one_hot",
    "validate_model",
]
