"""Test whether a sample lies in the Gaussian domain of attraction."""

from ._heavytail import (
    BadConfig,
    DegenerateSample,
    DomainError,
    Error,
    FitError,
    InsufficientSample,
    ParseError,
    SIGMA_PI_SQ,
    TWO_OVER_PI,
    bridge_path,
    critical_band,
    draw,
    err_confidence_interval,
    evaluate,
    heuristic_blocks_for_power,
    heuristic_power_bound,
    ks_distance_standard_normal,
    report_csv,
    run_experiment,
    run_test,
    sigma_pi,
    standardize,
    statistic,
    type2_decay_fit,
    uncentered_statistic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
