"""
Декоррелированный score-тест и одношаговая оценка для одной координаты alpha = theta_j.

    w_hat = argmin 1/2 w^T H_bb w - w^T H_ba + lambda' ||w||_1
    U(alpha, beta_hat) = grad_alpha L - w_hat^T grad_beta L
    H_a|b = H_aa - w_hat^T H_ba
    S_n = sqrt(n / H_a|b) * U(alpha0, beta_hat), 0 при H_a|b <= 0
    alpha_tilde = alpha_hat - U(alpha_hat, beta_hat) / H_a|b

Все производные - от MCMC-аппроксимации L_n^m. С поправкой на опорную цепь
n заменяется на n_eff = n H / (H + n V_mc), где V_mc - дисперсия опорной
части U (CurvatureOperator.monte_carlo_variance).
"""
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import norm

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_inference_logger
from likelihood import CurvatureOperator, curvature_at, eval_grad
from mrf import FeatureMap, check_theta
from samplers import ObservedSample, ReferenceChain
from solver import PenaltyConfig, ProxResult, accelerated_proximal_gradient

logger = get_inference_logger()

# Допуск на отрицательность квадратичной формы w^T H_bb w и на вырожденность H_a|b
# (относительно нецентрированного момента phi_alpha^2)
PSD_TOLERANCE = 1e-8


@dataclass(frozen=True)
class CoordinateSplit:
    """
    theta = (alpha, beta) с alpha в позиции target_index

    Attributes:
        target_index: Номер целевой координаты
        alpha_hat: theta_hat[target_index]
        beta_hat: theta_hat без целевой координаты
    """
    target_index: int
    alpha_hat: float
    beta_hat: np.ndarray

    @classmethod
    def from_theta(cls, theta: np.ndarray, target_index: int) -> "CoordinateSplit":
        theta = np.asarray(theta, dtype=float)
        if not 0 <= target_index < theta.shape[0]:
            raise ValueError(f"target_index={target_index} вне [0, {theta.shape[0]})")
        return cls(target_index, float(theta[target_index]), np.delete(theta, target_index))

    def reassemble(self, alpha: Optional[float] = None) -> np.ndarray:
        """Вектор theta с alpha (по умолчанию alpha_hat) в позиции target_index"""
        value = self.alpha_hat if alpha is None else alpha
        return np.insert(self.beta_hat, self.target_index, value)


@dataclass(frozen=True)
class InferenceResult:
    """
    Результат вывода по одной координате

    Attributes:
        target_index: Номер координаты
        n: Размер выборки
        alpha0: Проверяемое значение H0: alpha = alpha0
        alpha_hat: Штрафованная оценка
        w_hat: Вектор проекции (длина p - 1)
        u_hat: U(alpha0, beta_hat)
        u_at_estimate: U(alpha_hat, beta_hat)
        h_hat: H_a|b
        s_stat: Статистика S_n
        p_value: Двусторонний p-value 2(1 - Phi(|S_n|))
        alpha_tilde: Одношаговая оценка (nan, если H_a|b <= 0)
        ci_lo, ci_hi: Доверительный интервал уровня 1 - eta
        eta: Уровень непокрытия
        ci_defined: False при H_a|b <= 0
        w_kkt_residual: KKT-невязка программы w_hat
        mc_variance: Дисперсия опорной части U (0 без поправки)
        n_eff: Эффективный размер выборки в S_n и интервале (n без поправки)
    """
    target_index: int
    n: int
    alpha0: float
    alpha_hat: float
    w_hat: np.ndarray
    u_hat: float
    u_at_estimate: float
    h_hat: float
    s_stat: float
    p_value: float
    alpha_tilde: float
    ci_lo: float
    ci_hi: float
    eta: float
    ci_defined: bool
    w_kkt_residual: float
    mc_variance: float = 0.0
    n_eff: float = float("nan")

    @property
    def variance_scale(self) -> float:
        """n_eff / n: множитель размера выборки в нормированных статистиках"""
        return self.n_eff / self.n if np.isfinite(self.n_eff) else 1.0


def _beta_mask(p: int, target_index: int) -> np.ndarray:
    mask = np.ones(p, dtype=bool)
    mask[target_index] = False
    return mask


def solve_w_program(curvature: CurvatureOperator, target_index: int, lambda_prime: float,
                    solver_cfg: PenaltyConfig) -> ProxResult:
    """
    l1-штрафованная квадратичная программа для w_hat через произведения гессиана на вектор

    Args:
        curvature: Гессиан L_n^m в theta_hat
        target_index: Номер целевой координаты
        lambda_prime: Вес l1-штрафа
        solver_cfg: max_iter, tol, step_init

    Returns:
        ProxResult с x = w_hat
    """
    p = curvature.p
    if p < 2:
        raise ValueError("Программе w_hat нужно p >= 2")
    if lambda_prime < 0:
        raise ValueError(f"lambda' должен быть >= 0, получено {lambda_prime}")
    mask = _beta_mask(p, target_index)
    h_ba = curvature.column(target_index)[mask]
    embedded = np.zeros(p)

    def quadratic(w):
        embedded[mask] = w
        hw = curvature.matvec(embedded)[mask]
        curvature_value = float(w @ hw)
        if curvature_value < -PSD_TOLERANCE * max(1.0, float(w @ w)):
            raise RuntimeError(f"Квадратичная форма w^T H_bb w = {curvature_value:.3e} < 0")
        return 0.5 * curvature_value - float(w @ h_ba), hw - h_ba

    # След H_bb ограничивает наибольшее собственное число: шаг 1/trace не требует бэктрекинга
    trace = float(curvature.diagonal()[mask].sum())
    step = min(solver_cfg.step_init, 1.0 / trace) if trace > 0 else solver_cfg.step_init
    return accelerated_proximal_gradient(
        quadratic, np.zeros(p - 1), lambda_prime, solver_cfg.max_iter, solver_cfg.tol, step
    )


def fit_w_hat(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, theta_hat, target_index: int,
              lambda_prime: float, solver_cfg: PenaltyConfig) -> np.ndarray:
    """
    Оценка вектора проекции w_hat для координаты target_index

    Returns:
        w_hat длины p - 1
    """
    theta_hat = check_theta(theta_hat, fm.p)
    result = solve_w_program(curvature_at(fm, theta_hat, ref), target_index, lambda_prime, solver_cfg)
    if not result.converged:
        logger.warning(f"[WARN] w_hat[{target_index}]: нет сходимости, KKT={result.kkt_residual:.2e}")
    return result.x


def decorrelated_score(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, alpha0: float,
                       beta_hat, w_hat, target_index: int) -> float:
    """
    U(alpha0, beta_hat) = grad_alpha L - w_hat^T grad_beta L в точке (alpha0, beta_hat)
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    w_hat = np.asarray(w_hat, dtype=float)
    if beta_hat.shape != (fm.p - 1,) or w_hat.shape != (fm.p - 1,):
        raise ValueError(f"beta_hat и w_hat должны иметь длину p - 1 = {fm.p - 1}")
    theta = CoordinateSplit(target_index, float(alpha0), beta_hat).reassemble()
    grad = eval_grad(fm, theta, obs, ref)
    return float(grad[target_index] - w_hat @ np.delete(grad, target_index))


def variance_estimate(fm: FeatureMap, ref: ReferenceChain, theta_hat, w_hat, target_index: int,
                      curvature: Optional[CurvatureOperator] = None) -> float:
    """
    H_a|b = H_aa - w_hat^T H_ba в theta_hat; отрицательные значения допустимы
    """
    if curvature is None:
        curvature = curvature_at(fm, check_theta(theta_hat, fm.p), ref)
    column = curvature.column(target_index)
    return float(column[target_index] - np.asarray(w_hat) @ np.delete(column, target_index))


def infer_coordinate(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    theta_hat,
    target_index: int,
    lambda_prime: float,
    solver_cfg: PenaltyConfig,
    alpha0: float = 0.0,
    eta: float = 0.05,
    curvature: Optional[CurvatureOperator] = None,
    mc_correction: bool = False,
) -> InferenceResult:
    """
    Полный вывод по координате: w_hat, score-тест H0: alpha = alpha0,
    одношаговая оценка и доверительный интервал уровня 1 - eta

    mc_correction добавляет к дисперсии U ошибку Монте-Карло опорной цепи.
    """
    if not 0 < eta < 1:
        raise ValueError(f"eta должен лежать в (0, 1), получено {eta}")
    if obs.n < 2:
        raise ValueError(f"Для вывода нужно n >= 2, получено {obs.n}")
    theta_hat = check_theta(theta_hat, fm.p)
    split = CoordinateSplit.from_theta(theta_hat, target_index)
    if curvature is None:
        curvature = curvature_at(fm, theta_hat, ref)

    program = solve_w_program(curvature, target_index, lambda_prime, solver_cfg)
    w_hat = program.x
    if not program.converged:
        logger.warning(f"[WARN] w_hat[{target_index}]: нет сходимости, KKT={program.kkt_residual:.2e}")

    u_null = decorrelated_score(fm, obs, ref, alpha0, split.beta_hat, w_hat, target_index)
    u_est = decorrelated_score(fm, obs, ref, split.alpha_hat, split.beta_hat, w_hat, target_index)
    h_hat = variance_estimate(fm, ref, theta_hat, w_hat, target_index, curvature)
    n = obs.n
    mc_variance = 0.0
    n_eff = float(n)

    # Остаток округления центрированных признаков не считается дисперсией
    if h_hat > PSD_TOLERANCE * curvature.second_moment(target_index):
        if mc_correction:
            direction = np.insert(-w_hat, target_index, 1.0)
            mc_variance = curvature.monte_carlo_variance(direction)
            n_eff = n * h_hat / (h_hat + n * mc_variance)
        s_stat = float(np.sqrt(n_eff / h_hat) * u_null)
        p_value = float(2.0 * norm.sf(abs(s_stat)))
        alpha_tilde = split.alpha_hat - u_est / h_hat
        half_width = float(norm.ppf(1.0 - eta / 2.0) / np.sqrt(n_eff * h_hat))
        ci_lo, ci_hi, ci_defined = alpha_tilde - half_width, alpha_tilde + half_width, True
    else:
        logger.warning(f"[WARN] Координата {target_index}: H_a|b = {h_hat:.3e} <= 0, интервал не определен")
        s_stat, p_value = 0.0, 1.0
        alpha_tilde = ci_lo = ci_hi = float("nan")
        ci_defined = False

    return InferenceResult(
        target_index=target_index,
        n=n,
        alpha0=float(alpha0),
        alpha_hat=split.alpha_hat,
        w_hat=w_hat,
        u_hat=u_null,
        u_at_estimate=u_est,
        h_hat=h_hat,
        s_stat=s_stat,
        p_value=p_value,
        alpha_tilde=float(alpha_tilde),
        ci_lo=float(ci_lo),
        ci_hi=float(ci_hi),
        eta=eta,
        ci_defined=ci_defined,
        w_kkt_residual=program.kkt_residual,
        mc_variance=mc_variance,
        n_eff=n_eff,
    )


def score_test(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, theta_hat, alpha0: float,
               target_index: int, lambda_prime: float, solver_cfg: PenaltyConfig,
               eta: float = 0.05, mc_correction: bool = False) -> InferenceResult:
    """
    Декоррелированный score-тест H0: alpha = alpha0

    Returns:
        InferenceResult с u_hat = U(alpha0, beta_hat), s_stat и p_value
    """
    return infer_coordinate(fm, obs, ref, theta_hat, target_index, lambda_prime, solver_cfg, alpha0, eta,
                            mc_correction=mc_correction)


def one_step_estimate(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, theta_hat, target_index: int,
                      lambda_prime: float, solver_cfg: PenaltyConfig, eta: float = 0.05,
                      alpha0: float = 0.0, mc_correction: bool = False) -> InferenceResult:
    """
    Одношаговая оценка alpha_tilde = alpha_hat - U(alpha_hat, beta_hat) / H_a|b
    и интервал alpha_tilde +- Phi^-1(1 - eta/2) / sqrt(n H_a|b)

    dU/dalpha при фиксированных beta_hat и w_hat равна H_a|b.
    """
    return infer_coordinate(fm, obs, ref, theta_hat, target_index, lambda_prime, solver_cfg, alpha0, eta,
                            mc_correction=mc_correction)
