"""Covariate-shift PAC learning by rejection sampling."""

import json

from ._covshift import (
    SCHEMA_VERSION,
    ConfigError,
    DiscretePmf,
    Hypothesis,
    HypothesisClass,
    WeightRatioViolation,
    analytic_crossing,
    check_prop2_bound,
    check_theorem1_bound,
    chebyshev_support_size,
    chernoff_sample_size,
    discrepancy,
    erm_learn,
    exact_error,
    hardness_curve,
    heavy_cutoff,
    l1_distance,
    memorization_error_analytic,
    normalize_config,
    pac_sample_size,
    rejection_budget,
    run_da_pipeline,
    truncate,
    weight_ratio,
)
from ._covshift import run_experiment as _run_experiment

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "DiscretePmf",
    "Hypothesis",
    "HypothesisClass",
    "WeightRatioViolation",
    "analytic_crossing",
    "check_prop2_bound",
    "check_theorem1_bound",
    "chebyshev_support_size",
    "chernoff_sample_size",
    "discrepancy",
    "erm_learn",
    "exact_error",
    "hardness_curve",
    "heavy_cutoff",
    "l1_distance",
    "memorization_error_analytic",
    "normalize_config",
    "pac_sample_size",
    "rejection_budget",
    "run_da_pipeline",
    "run_experiment",
    "truncate",
    "weight_ratio",
]


def run_experiment(config_text):
    """Run a config; returns (csv text, summary dict)."""
    csv_text, summary = _run_experiment(config_text)
    return csv_text, json.loads(summary)
