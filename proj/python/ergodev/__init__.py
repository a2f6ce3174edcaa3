"""Decreasing-step Euler schemes, deviation bounds and Monte Carlo tails."""

from ._ergodev import (
    ConfigError,
    SimulationError,
    StepSequence,
    asclt_r,
    bakry_emery_alpha,
    cardan_lambda_min,
    cardan_root,
    clopper_pearson,
    confluence_alpha,
    coverage_to_a,
    gradient_bound,
    optimize_rho,
    p_lambda_min,
    p_polynomial,
    registry_names,
    simulate,
    tail_estimate,
    theta_grid,
    wallis_rho,
)

__version__ = "1.0.0"
