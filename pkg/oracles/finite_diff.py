"""
Центральные конечные разности для проверки градиентов и гессианов
"""
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np


@dataclass(frozen=True)
class FiniteDiffSpec:
    """
    Attributes:
        step: Шаг разностей
        scheme: Схема (только центральная)
        tol_grad: Относительный допуск для градиента
        tol_hess: Абсолютный допуск для гессиана
    """
    step: float = 1e-5
    scheme: Literal["central"] = "central"
    tol_grad: float = 1e-6
    tol_hess: float = 1e-5

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"Шаг должен быть > 0, получено {self.step}")
        if self.scheme != "central":
            raise ValueError(f"Поддерживается только центральная схема, получено {self.scheme}")


def fd_gradient(f: Callable[[np.ndarray], float], theta, spec: FiniteDiffSpec = FiniteDiffSpec()) -> np.ndarray:
    """
    Градиент скалярной функции центральными разностями

    Args:
        f: Скалярная функция
        theta: Точка
        spec: Параметры разностей

    Returns:
        Вектор (f(theta + h e_j) - f(theta - h e_j)) / 2h
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for j in range(theta.size):
        shift = np.zeros_like(theta)
        shift[j] = spec.step
        upper, lower = f(theta + shift), f(theta - shift)
        if not (np.isfinite(upper) and np.isfinite(lower)):
            raise ValueError(f"Функция не конечна в окрестности координаты {j}")
        grad[j] = (upper - lower) / (2.0 * spec.step)
    return grad


def fd_hessian(grad: Callable[[np.ndarray], np.ndarray], theta,
               spec: FiniteDiffSpec = FiniteDiffSpec()) -> np.ndarray:
    """Якобиан векторной функции (гессиан по градиенту), симметризованный"""
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    hess = np.empty((p, p))
    for j in range(p):
        shift = np.zeros(p)
        shift[j] = spec.step
        upper, lower = np.asarray(grad(theta + shift)), np.asarray(grad(theta - shift))
        if not (np.all(np.isfinite(upper)) and np.all(np.isfinite(lower))):
            raise ValueError(f"Градиент не конечен в окрестности координаты {j}")
        hess[:, j] = (upper - lower) / (2.0 * spec.step)
    return 0.5 * (hess + hess.T)


def fd_scalar_hessian(f: Callable[[np.ndarray], float], theta,
                      spec: FiniteDiffSpec = FiniteDiffSpec(step=1e-4)) -> np.ndarray:
    """
    Гессиан скалярной функции вторыми центральными разностями:

        (f(+h e_j +h e_k) - f(+h e_j -h e_k) - f(-h e_j +h e_k) + f(-h e_j -h e_k)) / 4h^2

    Шаг по умолчанию крупнее, чем у fd_gradient: ошибка округления растет как eps / h^2.
    """
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    h = spec.step
    basis = np.eye(p) * h
    hess = np.empty((p, p))
    for j in range(p):
        for k in range(j, p):
            values = [
                f(theta + basis[j] + basis[k]),
                f(theta + basis[j] - basis[k]),
                f(theta - basis[j] + basis[k]),
                f(theta - basis[j] - basis[k]),
            ]
            if not np.all(np.isfinite(values)):
                raise ValueError(f"Функция не конечна в окрестности координат {j}, {k}")
            hess[j, k] = hess[k, j] = (values[0] - values[1] - values[2] + values[3]) / (4.0 * h * h)
    return hess
