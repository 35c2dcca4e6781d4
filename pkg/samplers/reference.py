"""
Опорные цепи Y_1..Y_m: независимые гауссовские (на боксе - суженные на бокс) и равномерные точки
с известной плотностью h либо цепь Метрополиса со стационарной h ~ exp(theta_ref^T phi)
"""
from typing import Optional

import numpy as np
from scipy.stats import norm, truncnorm

from mrf import FeatureMap, StateSpace, check_theta
from .chains import ReferenceChain
from .metropolis import metropolis_chain
from .rng import RngSeed


def sample_reference_gaussian(m: int, d: int, seed: RngSeed, space: Optional[StateSpace] = None) -> ReferenceChain:
    """
    m независимых точек N(0, I_d); на боксе - N(0, I_d), суженное на бокс

    Args:
        m: Длина цепи
        d: Размерность
        seed: Зерно и подпоток
        space: Пространство целевой модели (на дискретном точки вне него получат нулевой вес)

    Returns:
        ReferenceChain; log_h - логарифм плотности точек относительно базовой меры space
    """
    if m < 1 or d < 1:
        raise ValueError(f"Требуется m >= 1 и d >= 1, получено m={m}, d={d}")
    rng = seed.generator()
    if space is None or space.is_discrete:
        draws = rng.standard_normal(size=(m, d))
        log_h = norm.logpdf(draws).sum(axis=1)
        return ReferenceChain(draws, log_h, "iid_gaussian", space)
    if space.d != d:
        raise ValueError(f"Размерность бокса {space.d} не совпадает с d={d}")
    lo = np.asarray(space.lo)
    hi = np.asarray(space.hi)
    draws = truncnorm.rvs(lo, hi, size=(m, d), random_state=rng)
    log_h = truncnorm.logpdf(draws, lo, hi).sum(axis=1) - space.log_base(draws)
    return ReferenceChain(draws, log_h, "iid_gaussian", space)


def sample_reference_uniform(space: StateSpace, m: int, seed: RngSeed) -> ReferenceChain:
    """m независимых равномерных точек на дискретном пространстве, log h = -d log r"""
    if not space.is_discrete:
        raise ValueError("Равномерная опорная цепь определена только для дискретного пространства")
    if m < 1:
        raise ValueError(f"Требуется m >= 1, получено {m}")
    draws = seed.generator().integers(0, space.r, size=(m, space.d)).astype(float)
    log_h = np.full(m, -space.d * np.log(space.r))
    return ReferenceChain(draws, log_h, "iid_uniform", space)


def sample_reference_markov(
    fm: FeatureMap,
    theta_ref,
    m: int,
    seed: RngSeed,
    proposal_sd: float = 1.0,
    burn_in: int = 1000,
    thin: int = 1,
    space: Optional[StateSpace] = None,
) -> ReferenceChain:
    """
    Цепь Метрополиса со стационарной плотностью h ~ exp(theta_ref^T phi)

    log_h хранится без нормировки: L_n^m сдвигается на константу,
    градиент и гессиан не меняются.
    """
    theta_ref = check_theta(theta_ref, fm.p)
    draws, _ = metropolis_chain(fm, theta_ref, m, proposal_sd, burn_in, thin, seed, space)
    log_h = fm.eval_batch(draws) @ theta_ref
    return ReferenceChain(draws, log_h, "markov_kernel", space or fm.space)
