"""
Векторы достаточных статистик phi(x) для экспоненциального семейства
p(x|theta) = exp(theta^T phi(x)) / C(theta).

Встроенные сценарии симуляций (d = 1):
    cos      phi_j(x) = cos(j x pi)
    arctan   phi_j(x) = arctan(j x) для j < p, последняя компонента log(p x + 1)
    rational phi_j(x) = 1 / (1 + x^j)
и модель Изинга на {0, 1}^d с попарными статистиками s_j s_k.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .state_space import StateSpace

BUILTIN_IDS = ("cos", "arctan", "rational")


@dataclass(frozen=True)
class FeatureMap:
    """
    Отображение состояний в R^p с объявленной оценкой ||phi(x)||_inf <= sup_bound

    Attributes:
        name: Имя отображения (ключ реестра)
        p: Размерность параметра
        fn: Векторизованная функция (N, d) -> (N, p)
        sup_bound: Объявленная граница K
        d: Размерность состояния
        space: Пространство, на котором определено отображение (если известно)
    """
    name: str
    p: int
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    sup_bound: float
    d: int = 1
    space: Optional[StateSpace] = field(default=None, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"Размерность p должна быть >= 1, получено {self.p}")
        if not self.sup_bound > 0:
            raise ValueError(f"sup_bound должен быть > 0, получено {self.sup_bound}")

    def eval_batch(self, states: np.ndarray) -> np.ndarray:
        """
        Вычисляет phi для набора состояний

        Args:
            states: Массив (N, d) или (N,) при d = 1

        Returns:
            Матрица признаков (N, p)
        """
        states = np.asarray(states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(-1, self.d)
        if states.shape[1] != self.d:
            raise ValueError(f"{self.name}: ожидались состояния размерности {self.d}, получено {states.shape[1]}")
        with np.errstate(over="ignore"):
            features = np.asarray(self.fn(states), dtype=float)
        if features.shape != (states.shape[0], self.p):
            raise ValueError(f"{self.name}: функция вернула форму {features.shape}, ожидалась {(states.shape[0], self.p)}")
        if not np.all(np.isfinite(features)):
            raise ValueError(f"{self.name}: phi(x) содержит нечисловые значения")
        return features

    def eval(self, state) -> np.ndarray:
        """phi(x) для одного состояния"""
        return self.eval_batch(np.asarray(state, dtype=float).reshape(1, self.d))[0]


def check_theta(theta, p: int) -> np.ndarray:
    """Проверяет вектор параметров: длина p и конечные значения"""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.shape[0] != p:
        raise ValueError(f"Длина theta {theta.shape} не совпадает с p={p}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta содержит нечисловые значения")
    return theta


def default_space(feature_id: str) -> StateSpace:
    """Бокс встроенного отображения с гауссовской базовой мерой N(0, 1)"""
    if feature_id == "cos":
        return StateSpace.box(1, -1.0, 1.0, base="gaussian")
    if feature_id in ("arctan", "rational"):
        return StateSpace.box(1, 0.0, 1.0, base="gaussian")
    raise ValueError(f"Неизвестное отображение: {feature_id}")


def _cos_map(p: int, space: StateSpace) -> FeatureMap:
    freqs = np.arange(1, p + 1) * np.pi
    return FeatureMap("cos", p, lambda x: np.cos(x[:, :1] * freqs), 1.0, space=space)


def _arctan_map(p: int, space: StateSpace) -> FeatureMap:
    lo, hi = space.lo[0], space.hi[0]
    if p * lo + 1 <= 0:
        raise ValueError(f"arctan: log(p x + 1) не определен на боксе [{lo}, {hi}] при p={p}")
    slopes = np.arange(1, p)

    def fn(x):
        col = x[:, :1]
        return np.hstack([np.arctan(col * slopes), np.log(p * col + 1)])

    bound = max(np.pi / 2, abs(np.log(p * hi + 1)), abs(np.log(p * lo + 1)))
    return FeatureMap("arctan", p, fn, float(bound), space=space)


def _rational_map(p: int, space: StateSpace) -> FeatureMap:
    lo = space.lo[0]
    if lo <= -1:
        raise ValueError(f"rational: 1/(1 + x^j) не ограничен на боксе с lo={lo}")
    powers = np.arange(1, p + 1)

    def fn(x):
        return 1.0 / (1.0 + np.power(x[:, :1], powers))

    return FeatureMap("rational", p, fn, float(1.0 / (1.0 + min(lo, 0.0))), space=space)


_BUILTIN_FACTORIES = {
    "cos": _cos_map,
    "arctan": _arctan_map,
    "rational": _rational_map,
}


def builtin_feature_map(feature_id: str, p: int, space: Optional[StateSpace] = None) -> FeatureMap:
    """
    Встроенное отображение из сценариев симуляций

    Args:
        feature_id: "cos", "arctan" или "rational"
        p: Размерность параметра
        space: Бокс выборки (по умолчанию default_space)

    Returns:
        FeatureMap с sup_bound для данного бокса
    """
    feature_id = feature_id.lower()
    if feature_id not in _BUILTIN_FACTORIES:
        raise ValueError(f"Неизвестное отображение: {feature_id}")
    if p < 1:
        raise ValueError(f"Размерность p должна быть >= 1, получено {p}")
    space = space or default_space(feature_id)
    if space.is_discrete or space.d != 1:
        raise ValueError("Встроенные отображения определены на одномерном боксе")
    return _BUILTIN_FACTORIES[feature_id](p, space)


def ising_feature_map(d: int, with_fields: bool = False) -> FeatureMap:
    """
    Модель Изинга на {0, 1}^d: спины s = 2x - 1, статистики s_j s_k для j < k

    Args:
        d: Число вершин (>= 2)
        with_fields: Добавить внешние поля s_j в конец вектора

    Returns:
        FeatureMap с p = d(d-1)/2 (+ d)
    """
    if d < 2:
        raise ValueError(f"Модели Изинга нужно d >= 2, получено {d}")
    rows, cols = np.triu_indices(d, k=1)

    def fn(x):
        spins = 2.0 * x - 1.0
        pairs = spins[:, rows] * spins[:, cols]
        return np.hstack([pairs, spins]) if with_fields else pairs

    p = len(rows) + (d if with_fields else 0)
    return FeatureMap("ising", p, fn, 1.0, d=d, space=StateSpace.discrete(d, 2))


# Реестр отображений по имени: фабрика (p, space) -> FeatureMap
_REGISTRY: Dict[str, Callable[[int, Optional[StateSpace]], FeatureMap]] = {
    name: (lambda p, space, _name=name: builtin_feature_map(_name, p, space)) for name in BUILTIN_IDS
}


def _ising_factory(p: int, space: Optional[StateSpace]) -> FeatureMap:
    if space is None or not space.is_discrete or space.r != 2:
        raise ValueError("ising требует дискретное пространство с r = 2")
    fm = ising_feature_map(space.d)
    if p and p != fm.p:
        raise ValueError(f"ising на d={space.d} вершинах имеет p={fm.p}, запрошено p={p}")
    return fm


_REGISTRY["ising"] = _ising_factory


def register_feature_map(name: str, factory: Callable[[int, Optional[StateSpace]], FeatureMap]) -> None:
    """Регистрирует пользовательское отображение под именем name"""
    _REGISTRY[name.lower()] = factory


def get_feature_map(name: str, p: int, space: Optional[StateSpace] = None) -> FeatureMap:
    """Отображение по имени из реестра"""
    factory = _REGISTRY.get(name.lower())
    if factory is None:
        raise ValueError(f"Отображение '{name}' не зарегистрировано. Доступны: {sorted(_REGISTRY)}")
    return factory(p, space)
