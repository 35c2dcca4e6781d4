"""
Метрополис со случайным блужданием для p(x|theta) ~ exp(theta^T phi(x)).

Непрерывный бокс: гауссовский шаг, выход за границы отклоняется; энергия
включает логарифм плотности базовой меры бокса.
Дискретное произведение: выбирается случайная вершина и новое значение
из остальных r - 1 (симметричное предложение).
"""
import sys
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

# Добавляем корень проекта в путь для импорта
sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_sampler_logger
from mrf import FeatureMap, StateSpace, check_theta, enumerate_states, state_index
from samplers.chains import ObservedSample
from samplers.rng import RngSeed

logger = get_sampler_logger()

ACCEPTANCE_BOUNDS = (0.05, 0.95)


def _resolve_space(fm: FeatureMap, space: Optional[StateSpace]) -> StateSpace:
    space = space or fm.space
    if space is None:
        raise ValueError(f"{fm.name}: не задано пространство состояний для выборки")
    if space.d != fm.d:
        raise ValueError(f"Размерность пространства {space.d} не совпадает с отображением {fm.d}")
    return space


def _continuous_chain(fm, theta, space, total, proposal_sd, rng, x0) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(space.lo)
    hi = np.asarray(space.hi)
    x = np.asarray(x0, dtype=float) if x0 is not None else 0.5 * (lo + hi)

    def energy_of(state):
        return float(fm.eval(state) @ theta + space.log_base(state)[0])

    energy = energy_of(x)
    steps = rng.normal(0.0, proposal_sd, size=(total, space.d))
    log_u = np.log(rng.uniform(size=total))
    chain = np.empty((total, space.d))
    accepted = np.zeros(total, dtype=bool)
    for i in range(total):
        proposal = x + steps[i]
        if np.all(proposal >= lo) and np.all(proposal <= hi):
            new_energy = energy_of(proposal)
            if new_energy - energy >= 0 or log_u[i] < new_energy - energy:
                x, energy = proposal, new_energy
                accepted[i] = True
        chain[i] = x
    return chain, accepted


def _discrete_chain(fm, theta, space, total, rng, x0) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x0, dtype=np.int64).copy() if x0 is not None else rng.integers(0, space.r, size=space.d)
    # На перечислимом пространстве энергии всех состояний считаются один раз
    table = None
    if space.is_enumerable():
        table = fm.eval_batch(enumerate_states(space)) @ theta

    def energy_of(state):
        if table is not None:
            return float(table[state_index(state, space.r)[0]])
        return float(fm.eval(state) @ theta)

    energy = energy_of(x)
    sites = rng.integers(0, space.d, size=total)
    shifts = rng.integers(1, space.r, size=total)
    log_u = np.log(rng.uniform(size=total))
    chain = np.empty((total, space.d), dtype=np.int64)
    accepted = np.zeros(total, dtype=bool)
    for i in range(total):
        proposal = x.copy()
        proposal[sites[i]] = (proposal[sites[i]] + shifts[i]) % space.r
        new_energy = energy_of(proposal)
        if new_energy - energy >= 0 or log_u[i] < new_energy - energy:
            x, energy = proposal, new_energy
            accepted[i] = True
        chain[i] = x
    return chain, accepted


def metropolis_chain(
    fm: FeatureMap,
    theta,
    count: int,
    proposal_sd: float = 1.0,
    burn_in: int = 1000,
    thin: int = 10,
    seed: RngSeed = RngSeed(0),
    space: Optional[StateSpace] = None,
    x0=None,
) -> Tuple[np.ndarray, float]:
    """
    Цепь Метрополиса с прореживанием

    Args:
        fm: Отображение признаков
        theta: Параметр целевого распределения
        count: Число сохраняемых состояний
        proposal_sd: Стандартное отклонение шага (непрерывный случай)
        burn_in: Число отбрасываемых начальных шагов
        thin: Сохраняется каждый thin-й шаг
        seed: Зерно и подпоток
        space: Пространство (по умолчанию fm.space)
        x0: Начальное состояние (по умолчанию центр бокса / случайное)

    Returns:
        (draws, acceptance_rate): массив (count, d) и доля принятых шагов после burn-in
    """
    if count < 1:
        raise ValueError(f"Число точек должно быть >= 1, получено {count}")
    if not proposal_sd > 0:
        raise ValueError(f"proposal_sd должен быть > 0, получено {proposal_sd}")
    if thin < 1:
        raise ValueError(f"thin должен быть >= 1, получено {thin}")
    if burn_in < 0:
        raise ValueError(f"burn_in должен быть >= 0, получено {burn_in}")
    theta = check_theta(theta, fm.p)
    space = _resolve_space(fm, space)
    rng = seed.generator()
    total = burn_in + count * thin

    if space.is_discrete:
        chain, accepted = _discrete_chain(fm, theta, space, total, rng, x0)
    else:
        chain, accepted = _continuous_chain(fm, theta, space, total, proposal_sd, rng, x0)

    kept = chain[burn_in + thin - 1::thin][:count]
    acceptance_rate = float(accepted[burn_in:].mean())
    if not ACCEPTANCE_BOUNDS[0] <= acceptance_rate <= ACCEPTANCE_BOUNDS[1]:
        logger.warning(
            f"[WARN] {fm.name}: доля принятых шагов {acceptance_rate:.3f} вне "
            f"[{ACCEPTANCE_BOUNDS[0]}, {ACCEPTANCE_BOUNDS[1]}] (proposal_sd={proposal_sd})"
        )
    else:
        logger.debug(f"[OK] {fm.name}: {count} точек, доля принятых шагов {acceptance_rate:.3f}")
    return kept.astype(float), acceptance_rate


def metropolis_sample(
    fm: FeatureMap,
    theta_star,
    n: int,
    proposal_sd: float = 1.0,
    burn_in: int = 1000,
    thin: int = 10,
    seed: RngSeed = RngSeed(0),
    space: Optional[StateSpace] = None,
) -> ObservedSample:
    """
    Наблюдаемая выборка X_1..X_n из p(.|theta*), трактуемая как независимая

    Returns:
        ObservedSample с закэшированными признаками и долей принятых шагов
    """
    draws, acceptance_rate = metropolis_chain(fm, theta_star, n, proposal_sd, burn_in, thin, seed, space)
    return ObservedSample.from_draws(fm, draws, acceptance_rate)


if __name__ == "__main__":
    from mrf import builtin_feature_map

    fm = builtin_feature_map("cos", 5)
    sample = metropolis_sample(fm, np.array([0.8, 0.0, 0.3, 0.0, 0.0]), n=500, seed=RngSeed(7))
    logger.info(f"[TEST] n={sample.n}, accept={sample.acceptance_rate:.3f}")
    logger.info(f"[TEST] mean phi = {np.round(sample.mean_features, 3)}")
