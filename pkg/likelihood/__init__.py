"""
MCMC-аппроксимация правдоподобия: веса важности, L_n^m, градиент, гессиан
"""
from .weights import WeightWorkspace, compute_weights
from .mc_likelihood import (
    CurvatureOperator,
    LikelihoodEval,
    bregman_diagnostic,
    curvature_at,
    eval_grad,
    eval_hess,
    eval_loss,
    evaluate,
    hess_vector_product,
    log_normalizer_estimate,
)

__all__ = [
    'WeightWorkspace',
    'compute_weights',
    'CurvatureOperator',
    'LikelihoodEval',
    'bregman_diagnostic',
    'curvature_at',
    'eval_grad',
    'eval_hess',
    'eval_loss',
    'evaluate',
    'hess_vector_product',
    'log_normalizer_estimate',
]
