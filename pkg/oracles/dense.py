"""
Плотные эталонные решатели для малых p: демпфированный Ньютон,
прямое решение для w_hat и дополнение Шура
"""
from typing import Callable

import numpy as np
from scipy import linalg

DENSE_MAX_P = 50


def dense_newton_solve(
    grad: Callable[[np.ndarray], np.ndarray],
    hess: Callable[[np.ndarray], np.ndarray],
    theta0,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> np.ndarray:
    """
    Демпфированный метод Ньютона до ||grad||_inf <= tol

    Шаг делится пополам, пока норма градиента не уменьшится; при
    неположительно определенном гессиане добавляется диагональная поправка.

    Args:
        grad: Градиент
        hess: Гессиан
        theta0: Начальная точка
        tol: Допуск на ||grad||_inf
        max_iter: Предел итераций

    Returns:
        Точка с ||grad||_inf <= tol
    """
    theta = np.array(theta0, dtype=float)
    if theta.size > DENSE_MAX_P:
        raise ValueError(f"Плотный Ньютон рассчитан на p <= {DENSE_MAX_P}, получено {theta.size}")
    g = np.asarray(grad(theta), dtype=float)
    for _ in range(max_iter):
        g_norm = np.abs(g).max()
        if g_norm <= tol:
            return theta
        h = np.asarray(hess(theta), dtype=float)
        direction = None
        ridge = 0.0
        scale = max(np.abs(np.diag(h)).max(), 1e-12)
        for _ in range(12):
            try:
                factor = linalg.cho_factor(h + ridge * np.eye(theta.size))
                direction = linalg.cho_solve(factor, g)
                break
            except linalg.LinAlgError:
                ridge = scale * 1e-10 if ridge == 0.0 else ridge * 10.0
        if direction is None:
            raise RuntimeError("Гессиан вырожден даже после демпфирования")
        step = 1.0
        for _ in range(40):
            candidate = theta - step * direction
            g_new = np.asarray(grad(candidate), dtype=float)
            if np.all(np.isfinite(g_new)) and np.abs(g_new).max() < g_norm:
                break
            step *= 0.5
        else:
            # Норма градиента не убывает - точность исчерпана
            if g_norm <= 10 * tol:
                return theta
            raise RuntimeError(f"Ньютон застрял при ||grad||_inf = {g_norm:.3e}")
        theta, g = candidate, g_new
    if np.abs(g).max() <= tol:
        return theta
    raise RuntimeError(f"Ньютон не сошелся за {max_iter} итераций, ||grad||_inf = {np.abs(g).max():.3e}")


def dense_w_hat(hess: np.ndarray, target_index: int) -> np.ndarray:
    """w* = H_bb^-1 H_ba прямым решением"""
    hess = np.asarray(hess, dtype=float)
    rest = np.delete(np.arange(hess.shape[0]), target_index)
    return linalg.solve(hess[np.ix_(rest, rest)], hess[rest, target_index], assume_a="pos")


def schur_complement(hess: np.ndarray, target_index: int) -> float:
    """H_aa - H_ab H_bb^-1 H_ba"""
    hess = np.asarray(hess, dtype=float)
    rest = np.delete(np.arange(hess.shape[0]), target_index)
    return float(hess[target_index, target_index] - hess[target_index, rest] @ dense_w_hat(hess, target_index))
