"""
Точные вычисления на малых дискретных пространствах полным перебором:
нормирующая константа C(theta), вероятности состояний, среднее и ковариация phi(X).
Используются как оракулы в тестах и в verify.
"""
import sys
from pathlib import Path
from typing import Tuple

import numpy as np
from scipy.special import logsumexp

# Добавляем корень проекта в путь для импорта
sys.path.insert(0, str(Path(__file__).parent.parent))

from mrf.feature_maps import FeatureMap, check_theta
from mrf.state_space import ENUMERATION_CAP, StateSpace, enumerate_states


def log_density_unnormalized(fm: FeatureMap, theta, x) -> float:
    """
    Ненормированная логарифмическая плотность theta^T phi(x)

    Args:
        fm: Отображение признаков
        theta: Вектор параметров длины p
        x: Одно состояние

    Returns:
        theta^T phi(x)
    """
    theta = check_theta(theta, fm.p)
    return float(fm.eval(x) @ theta)


def _enumerated_logits(fm: FeatureMap, theta, space: StateSpace, cap: int):
    theta = check_theta(theta, fm.p)
    if not space.is_enumerable(cap):
        raise ValueError(f"Пространство не перечислимо (предел {cap} состояний)")
    features = fm.eval_batch(enumerate_states(space, cap))
    return features, features @ theta


def brute_force_log_C(fm: FeatureMap, theta, space: StateSpace, cap: int = ENUMERATION_CAP) -> float:
    """
    log C(theta) = log sum_x exp(theta^T phi(x)) по всем r^d состояниям

    Args:
        fm: Отображение признаков
        theta: Вектор параметров
        space: Дискретное перечислимое пространство
        cap: Предел перебора

    Returns:
        Точное значение log C(theta)
    """
    _, logits = _enumerated_logits(fm, theta, space, cap)
    return float(logsumexp(logits))


def brute_force_probabilities(fm: FeatureMap, theta, space: StateSpace, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Вероятности p(x|theta) в порядке enumerate_states"""
    _, logits = _enumerated_logits(fm, theta, space, cap)
    return np.exp(logits - logsumexp(logits))


def brute_force_moments(fm: FeatureMap, theta, space: StateSpace,
                        cap: int = ENUMERATION_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """
    Точные E[phi(X)] и cov(phi(X)) при X ~ p(.|theta)

    Returns:
        (mean, cov): вектор длины p и симметричная матрица (p, p)
    """
    features, logits = _enumerated_logits(fm, theta, space, cap)
    probs = np.exp(logits - logsumexp(logits))
    mean = probs @ features
    centered = features - mean
    cov = centered.T @ (centered * probs[:, None])
    return mean, 0.5 * (cov + cov.T)


if __name__ == "__main__":
    from mrf.feature_maps import ising_feature_map

    space = StateSpace.discrete(d=3, r=2)
    fm = ising_feature_map(3)
    theta = np.array([0.5, -0.2, 0.3])
    print(f"log C = {brute_force_log_C(fm, theta, space):.6f}")
    mean, cov = brute_force_moments(fm, theta, space)
    print(f"E phi = {mean}")
    print(f"cov phi =\n{cov}")
