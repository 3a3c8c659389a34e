"""Nonparametric estimation and likelihood-based intervals for the Sen and
Sen-Shorrocks-Thon poverty indices, with a Monte Carlo study harness."""

from ._backend import ACTIVE_BACKEND
from .core import (
    IncomeSample,
    PoorPartition,
    empirical_cdf,
    gini_among_poor,
    income_gap_ratio,
    poor_partition,
    sen_from_components,
)
from .distributions import (
    DistributionSpec,
    Exponential,
    LogNormal,
    Pareto,
    parse_distribution,
    sample,
    true_index,
)
from .el import (
    ELSolution,
    EstimatingValues,
    el_confidence_interval,
    el_log_ratio,
    sen_el_values,
    solve_lambda,
    sst_el_values,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateInterval,
    DegenerateSubsample,
    Infeasible,
    InferenceError,
    MalformedNumber,
    MissingColumn,
    NegativeIncome,
    NoPoorObservations,
    NonConvergence,
    PovindexError,
    TooFewObservations,
    ZeroPoorMass,
)
from .estimators import (
    AsymptoticVariance,
    IndexEstimate,
    UStatComponents,
    normal_ci,
    sen_asymptotic_variance,
    sen_davidson,
    sen_plugin,
    sen_ustat,
    sen_ustat_kernel,
    sst_asymptotic_variance,
    sst_davidson,
    sst_plugin,
    sst_ustat,
    sst_ustat_kernel,
)
from .intervals import ConfidenceInterval, InversionDiagnostics
from .jel import (
    PseudoValues,
    jel_confidence_interval,
    jel_log_ratio,
    sen_jel_pseudovalues,
    sst_jel_pseudovalues,
)
from .simulation import (
    MonteCarloConfig,
    SimulationCellReport,
    run_ci_grid,
    run_estimator_grid,
)

__version__ = "0.1.0"
