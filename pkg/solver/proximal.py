"""
Ускоренный проксимальный градиент (FISTA) с бэктрекингом и рестартом
для задач вида f(x) + lambda1 * ||x||_1 с гладкой выпуклой f
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

# Минимальный шаг; меньший шаг означает сбой бэктрекинга
STEP_FLOOR = 1e-16
# Допуск на арифметику в условии достаточного убывания
ARMIJO_SLACK = 1e-12
# converged требует kkt_residual <= KKT_FACTOR * tol
KKT_FACTOR = 10.0

SmoothFn = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass(frozen=True)
class ProxResult:
    """
    Attributes:
        x: Решение
        objective: f(x) + lambda1 ||x||_1
        iterations: Число итераций
        kkt_residual: Нарушение условий оптимальности
        converged: Сходимость по критерию и сертификату KKT
        step: Итоговый шаг
    """
    x: np.ndarray
    objective: float
    iterations: int
    kkt_residual: float
    converged: bool
    step: float


def soft_threshold(z, kappa: float) -> np.ndarray:
    """
    Проксимальный оператор kappa * ||.||_1: sign(z) * max(|z| - kappa, 0)

    Args:
        z: Вектор
        kappa: Порог >= 0
    """
    if kappa < 0:
        raise ValueError(f"Порог должен быть >= 0, получено {kappa}")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - kappa, 0.0)


def l1_kkt_residual(smooth_grad: np.ndarray, x: np.ndarray, lambda1: float) -> float:
    """
    Максимальное нарушение субградиентных условий для f(x) + lambda1 ||x||_1

    Args:
        smooth_grad: Градиент гладкой части в x
        x: Точка
        lambda1: Вес l1-штрафа

    Returns:
        max_j |g_j + lambda1 sign(x_j)| при x_j != 0 и max(|g_j| - lambda1, 0) при x_j = 0
    """
    nonzero = x != 0
    violation = np.where(
        nonzero,
        np.abs(smooth_grad + lambda1 * np.sign(x)),
        np.maximum(np.abs(smooth_grad) - lambda1, 0.0),
    )
    return float(violation.max()) if violation.size else 0.0


def accelerated_proximal_gradient(
    smooth: SmoothFn,
    x0: np.ndarray,
    lambda1: float,
    max_iter: int,
    tol: float,
    step_init: float = 1.0,
) -> ProxResult:
    """
    Минимизирует f(x) + lambda1 ||x||_1

    Остановка: относительное изменение целевой функции < tol и сертификат
    kkt_residual <= KKT_FACTOR * tol, либо max_iter. Рестарт момента при росте
    целевой функции; принятые итерации не увеличивают ее.

    Args:
        smooth: x -> (f(x), grad f(x))
        x0: Начальная точка
        lambda1: Вес l1-штрафа
        max_iter: Максимум итераций
        tol: Допуск на относительное изменение целевой функции
        step_init: Начальный шаг бэктрекинга

    Returns:
        ProxResult
    """
    x = np.array(x0, dtype=float)
    f_x, g_x = smooth(x)
    obj = f_x + lambda1 * np.abs(x).sum()
    if not np.isfinite(obj):
        raise RuntimeError(f"Целевая функция не конечна в начальной точке: {obj}")
    y, f_y, g_y = x, f_x, g_x
    t = 1.0
    step = float(step_init)
    iterations = 0

    while iterations < max_iter:
        iterations += 1

        # Бэктрекинг: делим шаг пополам до выполнения условия достаточного убывания
        while True:
            cand = soft_threshold(y - step * g_y, step * lambda1)
            diff = cand - y
            f_c, g_c = smooth(cand)
            if not np.isfinite(f_c):
                raise RuntimeError(f"Целевая функция не конечна на итерации {iterations}")
            bound = f_y + g_y @ diff + (diff @ diff) / (2.0 * step)
            if f_c <= bound + ARMIJO_SLACK * max(1.0, abs(f_y)):
                break
            step *= 0.5
            if step < STEP_FLOOR:
                kkt = l1_kkt_residual(g_x, x, lambda1)
                return ProxResult(x, obj, iterations, kkt, False, step)

        new_obj = f_c + lambda1 * np.abs(cand).sum()
        if new_obj > obj + ARMIJO_SLACK * max(1.0, abs(obj)) and t > 1.0:
            # Рестарт: момент сбрасывается, шаг повторяется из x
            y, f_y, g_y, t = x, f_x, g_x, 1.0
            continue

        rel_change = abs(obj - new_obj) / max(1.0, abs(obj))
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        momentum = (t - 1.0) / t_next
        x_prev = x
        x, f_x, g_x, obj = cand, f_c, g_c, new_obj
        t = t_next
        if momentum > 0:
            y = x + momentum * (x - x_prev)
            f_y, g_y = smooth(y)
        else:
            y, f_y, g_y = x, f_x, g_x

        if rel_change < tol:
            kkt = l1_kkt_residual(g_x, x, lambda1)
            if kkt <= KKT_FACTOR * tol:
                return ProxResult(x, obj, iterations, kkt, True, step)

    kkt = l1_kkt_residual(g_x, x, lambda1)
    return ProxResult(x, obj, iterations, kkt, kkt <= KKT_FACTOR * tol, step)
