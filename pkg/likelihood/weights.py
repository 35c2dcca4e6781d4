"""
Самонормированные веса важности w_i(theta) = exp(theta^T phi(Y_i)) / h(Y_i)
в логарифмической шкале с одним сдвигом на максимум
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from mrf import FeatureMap, check_theta
from samplers import ReferenceChain


@dataclass(frozen=True)
class WeightWorkspace:
    """
    Attributes:
        log_w: log w_i(theta), -inf для точек вне пространства
        log_sum_w: log sum_i w_i
        norm_w: w_i / sum_j w_j
        ess: Эффективный размер выборки (sum w)^2 / sum w^2
        features: phi(Y_i), (m, p)
    """
    log_w: np.ndarray
    log_sum_w: float
    norm_w: np.ndarray
    ess: float
    features: np.ndarray

    @property
    def m(self) -> int:
        return self.log_w.shape[0]

    @property
    def phi_bar(self) -> np.ndarray:
        """Взвешенное среднее признаков опорной цепи"""
        return self.norm_w @ self.features


def compute_weights(fm: FeatureMap, theta, ref: ReferenceChain) -> WeightWorkspace:
    """
    Веса важности опорной цепи при данном theta

    Args:
        fm: Отображение признаков
        theta: Вектор параметров
        ref: Опорная цепь

    Returns:
        WeightWorkspace
    """
    theta = check_theta(theta, fm.p)
    features, support = ref.feature_matrix(fm)
    if not support.any():
        raise ValueError("Ни одна точка опорной цепи не попала в пространство состояний")
    log_w = np.full(ref.m, -np.inf)
    log_w[support] = features[support] @ theta - ref.log_h[support]
    log_sum_w = float(logsumexp(log_w))
    if not np.isfinite(log_sum_w):
        raise RuntimeError(f"Переполнение при вычислении весов: log sum w = {log_sum_w}")
    norm_w = np.exp(log_w - log_sum_w)
    ess = float(np.exp(2 * log_sum_w - logsumexp(2 * log_w)))
    # ESS в [1, m] с точностью до округления
    ess = min(max(ess, 1.0), float(ref.m))
    return WeightWorkspace(log_w, log_sum_w, norm_w, ess, features)
