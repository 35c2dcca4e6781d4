"""
MCMC-аппроксимация отрицательного логарифма правдоподобия

    L_n^m(theta) = -theta^T mean(phi(X_i)) + log(m^-1 sum_i w_i(theta)),

ее градиент -mean(phi(X)) + phi_bar(theta) и гессиан - взвешенная
ковариация phi(Y_i) при весах norm_w.
"""
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_likelihood_logger
from mrf import FeatureMap, check_theta
from samplers import ObservedSample, ReferenceChain
from .weights import WeightWorkspace, compute_weights

logger = get_likelihood_logger()

# Предел размерности для явного построения матрицы p x p
HESSIAN_MAX_P = 4096
# Ниже этого порога CurvatureOperator хранит плотную матрицу
DENSE_CURVATURE_MAX_P = 512
# Порог предупреждения по ESS (доля от m)
ESS_WARNING_FRACTION = 0.05


@dataclass(frozen=True)
class LikelihoodEval:
    """
    Attributes:
        value: L_n^m(theta)
        grad: Градиент длины p
        hess: Гессиан (p, p) или None
        ess: Эффективный размер выборки весов
    """
    value: float
    grad: np.ndarray
    hess: Optional[np.ndarray]
    ess: float


def _check_dims(fm: FeatureMap, obs: Optional[ObservedSample], ref: ReferenceChain):
    if obs is not None and obs.p != fm.p:
        raise ValueError(f"Размерность признаков выборки {obs.p} не совпадает с p={fm.p}")
    if ref.draws.shape[1] != fm.d:
        raise ValueError(f"Размерность опорной цепи {ref.draws.shape[1]} не совпадает с d={fm.d}")


def _loss_from_weights(theta: np.ndarray, obs: ObservedSample, ws: WeightWorkspace) -> float:
    value = -float(obs.mean_features @ theta) + ws.log_sum_w - np.log(ws.m)
    if not np.isfinite(value):
        raise RuntimeError(f"L_n^m не конечна: {value}")
    return value


def _weighted_covariance(ws: WeightWorkspace) -> np.ndarray:
    centered = ws.features - ws.phi_bar
    hess = centered.T @ (centered * ws.norm_w[:, None])
    return 0.5 * (hess + hess.T)


def log_normalizer_estimate(fm: FeatureMap, theta, ref: ReferenceChain) -> float:
    """
    MCMC-оценка log C(theta) = log(m^-1 sum_i w_i(theta))

    Для опорной цепи с нормированной h это состоятельная оценка log C(theta);
    для markov_kernel - с точностью до константы.
    """
    _check_dims(fm, None, ref)
    ws = compute_weights(fm, theta, ref)
    return ws.log_sum_w - np.log(ws.m)


def eval_loss(fm: FeatureMap, theta, obs: ObservedSample, ref: ReferenceChain) -> float:
    """
    L_n^m(theta) со стабилизацией log-sum-exp

    Args:
        fm: Отображение признаков
        theta: Вектор параметров
        obs: Наблюдаемая выборка
        ref: Опорная цепь

    Returns:
        Значение L_n^m(theta)
    """
    _check_dims(fm, obs, ref)
    theta = check_theta(theta, fm.p)
    return _loss_from_weights(theta, obs, compute_weights(fm, theta, ref))


def eval_grad(fm: FeatureMap, theta, obs: ObservedSample, ref: ReferenceChain) -> np.ndarray:
    """Градиент -mean(phi(X_i)) + sum_i norm_w_i phi(Y_i)"""
    _check_dims(fm, obs, ref)
    ws = compute_weights(fm, theta, ref)
    grad = ws.phi_bar - obs.mean_features
    if not np.all(np.isfinite(grad)):
        raise RuntimeError("Градиент L_n^m содержит нечисловые значения")
    return grad


def eval_hess(fm: FeatureMap, theta, ref: ReferenceChain) -> np.ndarray:
    """
    Гессиан: взвешенная ковариация phi(Y_i), симметричная и неотрицательно определенная

    Raises:
        ValueError: p > HESSIAN_MAX_P
    """
    if fm.p > HESSIAN_MAX_P:
        raise ValueError(f"p={fm.p} превышает предел {HESSIAN_MAX_P} для явного гессиана; используйте hess_vector_product")
    _check_dims(fm, None, ref)
    return _weighted_covariance(compute_weights(fm, theta, ref))


def hess_vector_product(fm: FeatureMap, theta, ref: ReferenceChain, v) -> np.ndarray:
    """
    Произведение гессиана на вектор за O(mp) без построения матрицы

    Args:
        v: Вектор длины p

    Returns:
        sum_i norm_w_i (phi(Y_i) - phi_bar)(phi(Y_i) - phi_bar)^T v
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (fm.p,):
        raise ValueError(f"Длина v {v.shape} не совпадает с p={fm.p}")
    _check_dims(fm, None, ref)
    ws = compute_weights(fm, theta, ref)
    centered = ws.features - ws.phi_bar
    return centered.T @ (ws.norm_w * (centered @ v))


def evaluate(fm: FeatureMap, theta, obs: ObservedSample, ref: ReferenceChain,
             with_hess: bool = False) -> LikelihoodEval:
    """
    Значение, градиент, ESS (и при необходимости гессиан) за один проход по весам
    """
    _check_dims(fm, obs, ref)
    theta = check_theta(theta, fm.p)
    ws = compute_weights(fm, theta, ref)
    if ws.ess < ESS_WARNING_FRACTION * ws.m:
        logger.warning(f"[WARN] ESS={ws.ess:.1f} < {ESS_WARNING_FRACTION}*m (m={ws.m}) при ||theta||_inf={np.abs(theta).max():.3f}")
    value = _loss_from_weights(theta, obs, ws)
    grad = ws.phi_bar - obs.mean_features
    hess = None
    if with_hess:
        if fm.p > HESSIAN_MAX_P:
            raise ValueError(f"p={fm.p} превышает предел {HESSIAN_MAX_P} для явного гессиана")
        hess = _weighted_covariance(ws)
    return LikelihoodEval(value, grad, hess, ws.ess)


def bregman_diagnostic(fm: FeatureMap, theta_a, theta_b, obs: ObservedSample, ref: ReferenceChain,
                       lambda2: float) -> float:
    """
    Симметричная дивергенция Брэгмана штрафованной функции с g(theta) = ||theta||_2^2:

        (a - b)^T [grad L(a) - grad L(b) + lambda2 * 2 (a - b)]

    Неотрицательна по выпуклости L_n^m.
    """
    if lambda2 < 0:
        raise ValueError(f"lambda2 должен быть >= 0, получено {lambda2}")
    theta_a = check_theta(theta_a, fm.p)
    theta_b = check_theta(theta_b, fm.p)
    diff = theta_a - theta_b
    grad_diff = eval_grad(fm, theta_a, obs, ref) - eval_grad(fm, theta_b, obs, ref)
    return float(diff @ (grad_diff + 2.0 * lambda2 * diff))


class CurvatureOperator:
    """
    Гессиан L_n^m в фиксированной точке theta: плотная матрица при p <= DENSE_CURVATURE_MAX_P,
    иначе произведения на вектор по центрированным признакам. Блоки по координатам
    нужны программе w_hat и оценке дисперсии.
    """

    def __init__(self, fm: FeatureMap, theta, ref: ReferenceChain, dense_max_p: int = DENSE_CURVATURE_MAX_P):
        _check_dims(fm, None, ref)
        ws = compute_weights(fm, theta, ref)
        self.p = fm.p
        self.ess = ws.ess
        self._centered = ws.features - ws.phi_bar
        self._norm_w = ws.norm_w
        self._second_moment = ws.norm_w @ (ws.features ** 2)
        self._dense = _weighted_covariance(ws) if fm.p <= dense_max_p else None
        # Независимые точки - пакеты по одной, марковская цепь - пакетные средние
        self.batch_size = 1 if ref.kind.startswith("iid") else max(1, int(np.sqrt(ref.m)))

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            return self._dense @ v
        return self._centered.T @ (self._norm_w * (self._centered @ v))

    def column(self, j: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[:, j].copy()
        return self._centered.T @ (self._norm_w * self._centered[:, j])

    def entry(self, j: int, k: int) -> float:
        if self._dense is not None:
            return float(self._dense[j, k])
        return float(self._norm_w @ (self._centered[:, j] * self._centered[:, k]))

    def diagonal(self) -> np.ndarray:
        if self._dense is not None:
            return np.diag(self._dense).copy()
        return self._norm_w @ (self._centered ** 2)

    def second_moment(self, j: int) -> float:
        """Нецентрированный взвешенный момент sum_i norm_w_i phi_j(Y_i)^2 (масштаб ошибок округления H_jj)"""
        return float(self._second_moment[j])

    def monte_carlo_variance(self, v: np.ndarray) -> float:
        """
        Дисперсия опорной части v^T grad L_n^m по линеаризации самонормированной оценки:

            sum_b (sum_{i in b} norm_w_i v^T (phi(Y_i) - phi_bar))^2

        по пакетам b размера batch_size.
        """
        contributions = self._norm_w * (self._centered @ np.asarray(v, dtype=float))
        if self.batch_size > 1:
            m = contributions.shape[0]
            edges = np.arange(0, m, self.batch_size)
            contributions = np.add.reduceat(contributions, edges)
        return float(np.sum(contributions ** 2))


def curvature_at(fm: FeatureMap, theta, ref: ReferenceChain) -> CurvatureOperator:
    """Оператор гессиана L_n^m в точке theta"""
    return CurvatureOperator(fm, theta, ref)
