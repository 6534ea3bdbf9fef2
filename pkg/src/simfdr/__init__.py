"""Single-index modulated multiple testing for bivariate p-values."""
from .baselines import BaselineReport, bh, mean_filter, mean_filter_pstar, storey, two_stage, weighted_bh
from .errors import ConfigError, EstimationError
from .estimation import (DEFAULT_LAMBDA_GRID, DecisionReport, LambdaGrid, fdr_hat, pi0_hat,
                         run_sim_procedure, select_theta, threshold_alpha, threshold_star)
from .null_model import (NonparametricNullCdf, NullModelParams, ParametricNullCdf, UniformNullCdf,
                         closed_form_sigma0, estimate_sigma0, fit_null_cdf, nonparametric_null_cdf,
                         null_density_oracle, parametric_null_cdf)
from .numeric import (RngStream, chi_square_cdf, sample_bivariate_normal, sample_bivariate_t,
                      std_normal_cdf, std_normal_quantile, student_t_cdf)
from .projection import PValueTable, ProjectedSample, project, project_all, theta_grid

__all__ = [
    "BaselineReport",
    "bh",
    "mean_filter",
    "mean_filter_pstar",
    "storey",
    "two_stage",
    "weighted_bh",
    "ConfigError",
    "EstimationError",
    "DEFAULT_LAMBDA_GRID",
    "DecisionReport",
    "LambdaGrid",
    "fdr_hat",
    "pi0_hat",
    "run_sim_procedure",
    "select_theta",
    "threshold_alpha",
    "threshold_star",
    "NonparametricNullCdf",
    "NullModelParams",
    "ParametricNullCdf",
    "UniformNullCdf",
    "closed_form_sigma0",
    "estimate_sigma0",
    "fit_null_cdf",
    "nonparametric_null_cdf",
    "null_density_oracle",
    "parametric_null_cdf",
    "RngStream",
    "chi_square_cdf",
    "sample_bivariate_normal",
    "sample_bivariate_t",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "PValueTable",
    "ProjectedSample",
    "project",
    "project_all",
    "theta_grid",
]

__version__ = "0.1.0"
