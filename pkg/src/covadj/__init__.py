"""covadj: covariate-adjusted treatment comparisons.

A library and CLI for comparing treatments after removing the influence of
a continuous covariate: ANCOVA in the common-slope model, one-way ANOVA
(with or without homogeneity of variances) and the Kruskal-Wallis test on
covariate-adjusted residuals, plus a reproducible Monte-Carlo harness that
estimates empirical size, power curves and between-method agreement over a
built-in catalog of 32 simulation scenarios.

Heavy per-replicate work runs on a compiled core when available
(``covadj._ccore``); a bit-identical pure-Python twin is the fallback.
"""

from .backend import BACKEND_NAME, available_backends
from .data import (Dataset, FittedLine, ResidualSet, TestOutcome,
                   METHOD_ANCOVA, METHOD_ANOVA_HOV, METHOD_ANOVA_NOHOV,
                   METHOD_KRUSKAL, METHOD_ORDER, load_dataset_csv)
from .distributions import ErrorDistSpec, ErrorKind, sample_error
from .errors import (CovadjError, DegenerateDesign, DomainError,
                     InputFormatError, InsufficientData, SimulationError,
                     UnknownCaseError, UnsupportedDesign, ZeroVarianceGroup)
from .methods import (StrategyRecommendation, ancova_f, anova_hov_residuals,
                      anova_nohov_residuals, kruskal_wallis_residuals,
                      recommend, run_all_methods)
from .regression import (covariate_adjusted_residuals, fit_grouped, fit_line,
                         slope_decomposition, test_slopes_equal,
                         test_slopes_zero, treatment_specific_residuals)
from .report import StudyReport
from .rng import RngStream
from .simulate import (CaseSpec, CovariateScheme, StudyConfig, TreatmentSpec,
                       agreement_significance, catalog, estimate_power_curve,
                       estimate_size, generate_sample, get_case, pilot_m_u)
from .special import chisq_cdf, chisq_sf, f_cdf, f_sf, normal_quantile

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "available_backends", "__version__",
    "Dataset", "FittedLine", "ResidualSet", "TestOutcome",
    "METHOD_ANCOVA", "METHOD_ANOVA_HOV", "METHOD_ANOVA_NOHOV",
    "METHOD_KRUSKAL", "METHOD_ORDER", "load_dataset_csv",
    "ErrorDistSpec", "ErrorKind", "sample_error",
    "CovadjError", "DegenerateDesign", "DomainError", "InputFormatError",
    "InsufficientData", "SimulationError", "UnknownCaseError",
    "UnsupportedDesign", "ZeroVarianceGroup",
    "StrategyRecommendation", "ancova_f", "anova_hov_residuals",
    "anova_nohov_residuals", "kruskal_wallis_residuals", "recommend",
    "run_all_methods",
    "covariate_adjusted_residuals", "fit_grouped", "fit_line",
    "slope_decomposition", "test_slopes_equal", "test_slopes_zero",
    "treatment_specific_residuals",
    "StudyReport", "RngStream",
    "CaseSpec", "CovariateScheme", "StudyConfig", "TreatmentSpec",
    "agreement_significance", "catalog", "estimate_power_curve",
    "estimate_size", "generate_sample", "get_case", "pilot_m_u",
    "chisq_cdf", "chisq_sf", "f_cdf", "f_sf", "normal_quantile",
]
