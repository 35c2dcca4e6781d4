"""
Elastic-net решатель и кросс-валидация параметров штрафа
"""
from .proximal import ProxResult, accelerated_proximal_gradient, l1_kkt_residual, soft_threshold
from .elastic_net import (
    FitResult,
    PenaltyConfig,
    default_penalty_grid,
    fit_result_frame,
    kkt_residual,
    solve,
    solve_path,
)
from .cross_validation import CVRow, cross_validate, cv_table_frame, fit_with_cv, fold_indices

__all__ = [
    'ProxResult',
    'accelerated_proximal_gradient',
    'l1_kkt_residual',
    'soft_threshold',
    'FitResult',
    'PenaltyConfig',
    'default_penalty_grid',
    'fit_result_frame',
    'kkt_residual',
    'solve',
    'solve_path',
    'CVRow',
    'cross_validate',
    'cv_table_frame',
    'fit_with_cv',
    'fold_indices',
]
