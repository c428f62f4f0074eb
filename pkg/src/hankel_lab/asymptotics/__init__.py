"""Sweeps over alpha, log-law fits and the identity and growth suites."""

from .fitting import LogLawFit, fit_affine_log, fit_log_law, log_law_model
from .suites import Instance, SuiteReport, default_instances, growth_suite, identity_suite
from .sweeps import (
    Check,
    FitSettings,
    SweepConfig,
    SweepRecord,
    SweepResult,
    WilfSettings,
    measure_point,
    run_sweep,
    run_wilf,
    sweep_or_empty,
)

__all__ = [
    "Check", "FitSettings", "Instance", "LogLawFit", "SuiteReport", "SweepConfig",
    "SweepRecord", "SweepResult", "WilfSettings", "default_instances", "fit_affine_log",
    "fit_log_law", "growth_suite", "identity_suite", "log_law_model", "measure_point",
    "run_sweep", "run_wilf", "sweep_or_empty",
]
