"""
Независимые оракулы: конечные разности, плотные решатели, переборные правила отбора
"""
from .finite_diff import FiniteDiffSpec, fd_gradient, fd_hessian, fd_scalar_hessian
from .dense import dense_newton_solve, dense_w_hat, schur_complement
from .sweeps import exhaustive_ebh_kstar, exhaustive_mirror_cutoff

__all__ = [
    'FiniteDiffSpec',
    'fd_gradient',
    'fd_hessian',
    'fd_scalar_hessian',
    'dense_newton_solve',
    'dense_w_hat',
    'schur_complement',
    'exhaustive_ebh_kstar',
    'exhaustive_mirror_cutoff',
]
