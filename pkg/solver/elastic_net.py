"""
Штрафованная Elastic-net MCMC-MLE:

    theta_hat = argmin L_n^m(theta) + lambda1 ||theta||_1 + lambda2 ||theta||_2^2
"""
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_solver_logger
from likelihood import compute_weights
from likelihood.mc_likelihood import ESS_WARNING_FRACTION
from mrf import FeatureMap, check_theta
from samplers import ObservedSample, ReferenceChain
from .proximal import accelerated_proximal_gradient, l1_kkt_residual

logger = get_solver_logger()


@dataclass(frozen=True)
class PenaltyConfig:
    """
    Параметры штрафа и оптимизатора

    Attributes:
        lambda1: Вес l1-штрафа
        lambda2: Вес l2-штрафа (ridge)
        lambda_prime: Вес l1-штрафа программы w_hat
        max_iter: Максимум итераций
        tol: Допуск на относительное изменение целевой функции
        step_init: Начальный шаг бэктрекинга
    """
    lambda1: float
    lambda2: float = 0.0
    lambda_prime: float = 0.0
    max_iter: int = 5000
    tol: float = 1e-8
    step_init: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda_prime"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} должен быть конечным и >= 0, получено {value}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter должен быть >= 1, получено {self.max_iter}")
        if not self.tol > 0:
            raise ValueError(f"tol должен быть > 0, получено {self.tol}")
        if not self.step_init > 0:
            raise ValueError(f"step_init должен быть > 0, получено {self.step_init}")

    @property
    def fit_key(self) -> Tuple[float, float, int, float, float]:
        """Параметры, от которых зависит theta_hat (lambda_prime не влияет)"""
        return (self.lambda1, self.lambda2, self.max_iter, self.tol, self.step_init)

    def with_lambdas(self, **kwargs) -> "PenaltyConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class FitResult:
    """
    Attributes:
        theta_hat: Оценка
        objective: Значение штрафованной целевой функции
        iterations: Число итераций
        kkt_residual: Нарушение субградиентных условий
        converged: Сходимость (влечет kkt_residual <= 10 tol)
        support_size: Число ненулевых координат
        ess: ESS весов опорной цепи в theta_hat
    """
    theta_hat: np.ndarray
    objective: float
    iterations: int
    kkt_residual: float
    converged: bool
    support_size: int
    ess: float


def kkt_residual(grad: np.ndarray, theta: np.ndarray, lambda1: float, lambda2: float) -> float:
    """
    Нарушение условий оптимальности Elastic-net

    Args:
        grad: Градиент L_n^m в theta
        theta: Точка
        lambda1, lambda2: Веса штрафов
    """
    return l1_kkt_residual(grad + 2.0 * lambda2 * theta, theta, lambda1)


def _smooth_objective(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, lambda2: float):
    """Гладкая часть L_n^m(theta) + lambda2 ||theta||^2 и ее градиент"""
    def smooth(theta):
        ws = compute_weights(fm, theta, ref)
        value = -float(obs.mean_features @ theta) + ws.log_sum_w - np.log(ws.m)
        grad = ws.phi_bar - obs.mean_features
        return value + lambda2 * float(theta @ theta), grad + 2.0 * lambda2 * theta
    return smooth


def solve(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain, cfg: PenaltyConfig,
          theta_init=None) -> FitResult:
    """
    Elastic-net MCMC-MLE ускоренным проксимальным градиентом

    Args:
        fm: Отображение признаков
        obs: Наблюдаемая выборка
        ref: Опорная цепь
        cfg: Параметры штрафа
        theta_init: Начальная точка (по умолчанию ноль)

    Returns:
        FitResult
    """
    if obs.p != fm.p:
        raise ValueError(f"Размерность признаков выборки {obs.p} не совпадает с p={fm.p}")
    theta0 = np.zeros(fm.p) if theta_init is None else check_theta(theta_init, fm.p)
    result = accelerated_proximal_gradient(
        _smooth_objective(fm, obs, ref, cfg.lambda2),
        theta0,
        cfg.lambda1,
        cfg.max_iter,
        cfg.tol,
        cfg.step_init,
    )
    ess = compute_weights(fm, result.x, ref).ess
    fit = FitResult(
        theta_hat=result.x,
        objective=float(result.objective),
        iterations=result.iterations,
        kkt_residual=result.kkt_residual,
        converged=result.converged,
        support_size=int(np.count_nonzero(result.x)),
        ess=ess,
    )
    if not fit.converged:
        logger.warning(
            f"[WARN] Нет сходимости: lambda1={cfg.lambda1:.4g}, lambda2={cfg.lambda2:.4g}, "
            f"итераций={fit.iterations}, KKT={fit.kkt_residual:.2e}, шаг={result.step:.1e}"
        )
    else:
        logger.debug(f"[OK] lambda1={cfg.lambda1:.4g}: итераций={fit.iterations}, носитель={fit.support_size}")
    if ess < ESS_WARNING_FRACTION * ref.m:
        logger.warning(f"[WARN] ESS={ess:.1f} в theta_hat при m={ref.m}")
    return fit


def solve_path(fm: FeatureMap, obs: ObservedSample, ref: ReferenceChain,
               configs: Sequence[PenaltyConfig], theta_init=None) -> List[FitResult]:
    """
    Решения для набора конфигураций с теплым стартом по убыванию lambda1

    Одинаковые (по fit_key) конфигурации решаются один раз, так что дубликаты
    получают идентичные оценки.

    Returns:
        Список FitResult в порядке configs
    """
    order = sorted(range(len(configs)), key=lambda i: (-configs[i].lambda1, -configs[i].lambda2, i))
    cache: Dict[tuple, FitResult] = {}
    warm = None if theta_init is None else check_theta(theta_init, fm.p)
    supports = []
    for i in order:
        key = configs[i].fit_key
        if key not in cache:
            cache[key] = solve(fm, obs, ref, configs[i], warm)
            warm = cache[key].theta_hat
            supports.append(cache[key].support_size)

    if len(supports) > 1:
        steps = np.diff(supports)
        share = float(np.mean(steps >= 0))
        logger.debug(f"Путь по lambda1: носители {supports}, неубывающих шагов {share:.0%}")
    return [cache[c.fit_key] for c in configs]


def default_penalty_grid(n: int, m: int, p: int, n_lambda: int = 8,
                         ridge_ratios: Sequence[float] = (0.1, 1.0),
                         scale: float = 1.0, **solver_kwargs) -> List[PenaltyConfig]:
    """
    Сетка (lambda1, lambda2, lambda') по порядку sqrt(log p/n) + sqrt(log p/m) + log p/m

    lambda1 - n_lambda точек геометрической сетки на [0.01, 1] * rate * scale,
    lambda2 = c * lambda1 для c из ridge_ratios, lambda' = lambda1.
    """
    if min(n, m, p) < 1:
        raise ValueError(f"Требуется n, m, p >= 1, получено n={n}, m={m}, p={p}")
    log_p = max(np.log(p), 1.0)
    rate = np.sqrt(log_p / n) + np.sqrt(log_p / m) + log_p / m
    grid = []
    for lambda1 in np.geomspace(0.01, 1.0, n_lambda) * rate * scale:
        for ratio in ridge_ratios:
            grid.append(PenaltyConfig(float(lambda1), float(ratio * lambda1), float(lambda1), **solver_kwargs))
    return grid


def fit_result_frame(fit: FitResult, cfg: Optional[PenaltyConfig] = None) -> pd.DataFrame:
    """Таблица для CSV: одна строка на координату theta_hat с диагностикой решателя"""
    frame = pd.DataFrame({
        "index": np.arange(fit.theta_hat.shape[0]),
        "theta_hat": fit.theta_hat,
    })
    frame["objective"] = fit.objective
    frame["iterations"] = fit.iterations
    frame["kkt_residual"] = fit.kkt_residual
    frame["converged"] = fit.converged
    frame["support_size"] = fit.support_size
    frame["ess"] = fit.ess
    if cfg is not None:
        frame["lambda1"] = cfg.lambda1
        frame["lambda2"] = cfg.lambda2
    return frame
