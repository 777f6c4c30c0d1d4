"""One-sample log-rank testing against parametric reference hazard curves.

Workflow: ingest right-censored cohorts, fit a reference cumulative hazard to
historic control data by censored maximum likelihood, then test an
experimental cohort against that curve, with an optional variance correction
for the uncertainty the fitting step introduces. A Monte Carlo engine
measures type-I-error behaviour of the procedures.
"""

__version__ = "0.1.0"

from .data import (
    Cohort,
    Observation,
    StudyHorizon,
    counting_process,
    default_horizon,
    ingest_csv,
    write_csv,
)
from .errors import (
    DegenerateTestError,
    DomainError,
    FitError,
    OslrError,
    RowValidationError,
    SchemaError,
    SelectionError,
    UsageError,
)
from .families import (
    EXPONENTIAL,
    FAMILIES,
    LOGLOGISTIC,
    WEIBULL,
    FamilyDescriptor,
    cumulative_hazard,
    density,
    family,
    grad_cumulative_hazard,
    hazard,
    loglik_derivatives,
    survival,
    total_loglik,
)
from .fitting import (
    FitResult,
    aic,
    empirical_information,
    fit_mle,
    pseudo_inverse,
    select_model,
)
from .logrank import (
    ReferenceCurve,
    TestReport,
    compensated_process,
    critical_value,
    expected_events,
    normal_cdf,
    normal_quantile,
    oslr_test,
    p_one_sided,
    p_two_sided,
    two_sample_logrank,
    v1_hat,
    v2_hat,
    zscore,
)
from .nonparametric import StepCurve, kaplan_meier, nelson_aalen
from .simulation import (
    PROCEDURES,
    Scenario,
    SimulationResult,
    generate_cohort,
    load_scenarios,
    mc_error_interval,
    replicate_rng,
    run_replicate,
    run_scenario,
)

__all__ = [
    "__version__",
    "Cohort",
    "Observation",
    "StudyHorizon",
    "counting_process",
    "default_horizon",
    "ingest_csv",
    "write_csv",
    "OslrError",
    "SchemaError",
    "RowValidationError",
    "DomainError",
    "FitError",
    "SelectionError",
    "DegenerateTestError",
    "UsageError",
    "FamilyDescriptor",
    "FAMILIES",
    "EXPONENTIAL",
    "WEIBULL",
    "LOGLOGISTIC",
    "family",
    "cumulative_hazard",
    "survival",
    "density",
    "hazard",
    "grad_cumulative_hazard",
    "loglik_derivatives",
    "total_loglik",
    "FitResult",
    "fit_mle",
    "empirical_information",
    "aic",
    "select_model",
    "pseudo_inverse",
    "ReferenceCurve",
    "TestReport",
    "expected_events",
    "compensated_process",
    "v1_hat",
    "v2_hat",
    "oslr_test",
    "two_sample_logrank",
    "zscore",
    "normal_cdf",
    "normal_quantile",
    "critical_value",
    "p_one_sided",
    "p_two_sided",
    "StepCurve",
    "kaplan_meier",
    "nelson_aalen",
    "PROCEDURES",
    "Scenario",
    "SimulationResult",
    "generate_cohort",
    "replicate_rng",
    "run_replicate",
    "run_scenario",
    "mc_error_interval",
    "load_scenarios",
]
