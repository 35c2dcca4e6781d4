"""
Декоррелированный вывод: score-тест, одношаговая оценка, доверительные интервалы
"""
from .decorrelated import (
    CoordinateSplit,
    InferenceResult,
    decorrelated_score,
    fit_w_hat,
    infer_coordinate,
    one_step_estimate,
    score_test,
    solve_w_program,
    variance_estimate,
)
from .batch import infer_all, inference_frame

__all__ = [
    'CoordinateSplit',
    'InferenceResult',
    'decorrelated_score',
    'fit_w_hat',
    'infer_coordinate',
    'one_step_estimate',
    'score_test',
    'solve_w_program',
    'variance_estimate',
    'infer_all',
    'inference_frame',
]
