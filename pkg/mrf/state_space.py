"""
Пространства состояний марковского поля: конечное произведение {0..r-1}^d
и непрерывный бокс [lo, hi]^d (для симуляций с d = 1).

На боксе плотность p(x|theta) берется относительно базовой меры: лебеговой
или стандартной гауссовской, суженной на бокс.
"""
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

# Максимальное число состояний для полного перебора
ENUMERATION_CAP = 2 ** 20

BaseMeasure = Literal["lebesgue", "gaussian"]
BASE_MEASURES = ("lebesgue", "gaussian")


@dataclass(frozen=True)
class StateSpace:
    """
    Пространство состояний

    Attributes:
        kind: "discrete" (DiscreteProduct) или "box" (ContinuousBox)
        d: Число вершин / размерность
        r: Число состояний в вершине (только discrete)
        lo: Нижние границы бокса по компонентам (только box)
        hi: Верхние границы бокса по компонентам (только box)
        base: Базовая мера бокса; для discrete всегда считающая ("lebesgue")
    """
    kind: Literal["discrete", "box"]
    d: int
    r: int = 0
    lo: Tuple[float, ...] = ()
    hi: Tuple[float, ...] = ()
    base: BaseMeasure = "lebesgue"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"Размерность d должна быть >= 1, получено {self.d}")
        if self.kind == "discrete":
            if self.r < 2:
                raise ValueError(f"Число состояний r должно быть >= 2, получено {self.r}")
            if self.base != "lebesgue":
                raise ValueError("Гауссовская базовая мера определена только для бокса")
        elif self.kind == "box":
            if len(self.lo) != self.d or len(self.hi) != self.d:
                raise ValueError("Границы бокса должны иметь длину d")
            if any(not np.isfinite(a) or not np.isfinite(b) or a >= b for a, b in zip(self.lo, self.hi)):
                raise ValueError(f"Требуется lo < hi покомпонентно: lo={self.lo}, hi={self.hi}")
            if self.base not in BASE_MEASURES:
                raise ValueError(f"Неизвестная базовая мера: {self.base}. Доступны: {BASE_MEASURES}")
        else:
            raise ValueError(f"Неизвестный тип пространства: {self.kind}")

    @classmethod
    def discrete(cls, d: int, r: int) -> "StateSpace":
        return cls(kind="discrete", d=d, r=r)

    @classmethod
    def box(cls, d: int, lo, hi, base: BaseMeasure = "lebesgue") -> "StateSpace":
        """Бокс; скалярные границы размножаются на все d компонент"""
        lo_t = tuple(float(v) for v in np.broadcast_to(np.asarray(lo, dtype=float), (d,)))
        hi_t = tuple(float(v) for v in np.broadcast_to(np.asarray(hi, dtype=float), (d,)))
        return cls(kind="box", d=d, lo=lo_t, hi=hi_t, base=base)

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def size(self) -> int:
        """Число состояний r^d (только для дискретного пространства)"""
        if not self.is_discrete:
            raise ValueError("Непрерывное пространство не имеет конечного числа состояний")
        return self.r ** self.d

    def is_enumerable(self, cap: int = ENUMERATION_CAP) -> bool:
        return self.is_discrete and self.size <= cap

    def contains(self, states: np.ndarray) -> np.ndarray:
        """
        Маска принадлежности состояний пространству

        Args:
            states: Массив (N, d)

        Returns:
            Булев массив длины N
        """
        states = np.atleast_2d(np.asarray(states, dtype=float))
        if states.shape[1] != self.d:
            raise ValueError(f"Ожидались состояния размерности {self.d}, получено {states.shape[1]}")
        if self.is_discrete:
            in_range = (states >= 0) & (states <= self.r - 1) & (states == np.round(states))
            return np.all(in_range, axis=1)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((states >= lo) & (states <= hi), axis=1)

    def log_base(self, states: np.ndarray) -> np.ndarray:
        """
        Логарифм плотности базовой меры без нормировки: 0 или -||x||^2 / 2

        Args:
            states: Массив (N, d)

        Returns:
            Массив длины N
        """
        states = np.atleast_2d(np.asarray(states, dtype=float))
        if self.base == "gaussian":
            return -0.5 * np.sum(states ** 2, axis=1)
        return np.zeros(states.shape[0])


def enumerate_states(space: StateSpace, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """
    Перечисляет все состояния дискретного пространства в лексикографическом порядке

    Args:
        space: Дискретное пространство с r^d <= cap
        cap: Предел перебора

    Returns:
        Целочисленный массив (r^d, d)
    """
    if not space.is_discrete:
        raise ValueError("Перебор возможен только для дискретного пространства")
    if not space.is_enumerable(cap):
        raise ValueError(f"Пространство из {space.r}^{space.d} состояний превышает предел перебора {cap}")
    grid = np.indices((space.r,) * space.d).reshape(space.d, -1).T
    return grid.astype(np.int64)


def state_index(states: np.ndarray, r: int) -> np.ndarray:
    """Номер состояния в лексикографическом порядке enumerate_states"""
    states = np.atleast_2d(states).astype(np.int64)
    d = states.shape[1]
    weights = r ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return states @ weights
