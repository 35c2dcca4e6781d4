"""
Генерация истинного параметра theta*_j = U_j * 1(U'_j < prob)
"""
from typing import Tuple

import numpy as np

from samplers import RngSeed


def generate_truth(p: int, prob: float, seed: RngSeed) -> Tuple[np.ndarray, np.ndarray]:
    """
    Разреженный theta* с независимыми равномерными U, U'

    Args:
        p: Размерность
        prob: Вероятность ненулевой координаты, (0, 1]
        seed: Зерно

    Returns:
        (theta_star, support): вектор и отсортированные номера ненулевых координат
    """
    if p < 1:
        raise ValueError(f"p должен быть >= 1, получено {p}")
    if not 0 < prob <= 1:
        raise ValueError(f"prob должен лежать в (0, 1], получено {prob}")
    rng = seed.generator()
    u = rng.uniform(size=p)
    u_gate = rng.uniform(size=p)
    theta = u * (u_gate < prob)
    return theta, np.nonzero(theta)[0]
