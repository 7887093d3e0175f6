"""Oracles, instance generators, metrics and the experiment runner."""

from .instances import free_core_formula, random_3cnf, random_3cnf_with_count
from .metrics import (
    FrequencyTable,
    chi_square_uniform,
    coverage,
    fraction_at_least,
    n_unif,
    scaled_variance,
)
from .oracles import MAX_ORACLE_VARS, OracleTooLarge, brute_force_count, brute_force_witnesses
from .runner import (
    ALGORITHMS,
    ExperimentParams,
    RunRecord,
    RunReport,
    build_report,
    iter_runs,
    read_log,
    report_from_log,
    run_experiment,
)
