"""
Симуляционные эксперименты: конфигурация, генерация данных, прогоны и отчеты
"""
from .experiment_config import CVSettings, ExperimentConfig, SamplerSettings, default_threads
from .truth import generate_truth
from .pipeline import Dataset, FittedModel, cell_seed, fit_model, penalty_grid, prepare_dataset, simulate_dataset
from .experiments import (
    ExperimentRecord,
    METRICS,
    long_records,
    run_coverage_experiment,
    run_experiment,
    run_fdr_experiment,
    run_l1_error_experiment,
    run_replications,
    summarize_coverage,
    summarize_fdr,
    summarize_l1_error,
)

__all__ = [
    'CVSettings',
    'ExperimentConfig',
    'SamplerSettings',
    'default_threads',
    'generate_truth',
    'Dataset',
    'FittedModel',
    'cell_seed',
    'fit_model',
    'penalty_grid',
    'prepare_dataset',
    'simulate_dataset',
    'ExperimentRecord',
    'METRICS',
    'long_records',
    'run_coverage_experiment',
    'run_experiment',
    'run_fdr_experiment',
    'run_l1_error_experiment',
    'run_replications',
    'summarize_coverage',
    'summarize_fdr',
    'summarize_l1_error',
]
