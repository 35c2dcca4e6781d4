"""
Контейнеры выборок: опорная цепь Y_1..Y_m с плотностями h(Y_i)
и наблюдаемая выборка X_1..X_n с закэшированными признаками
"""
from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple

import numpy as np
import pandas as pd

from mrf import FeatureMap, StateSpace

ReferenceKind = Literal["iid_gaussian", "iid_uniform", "markov_kernel"]


@dataclass(frozen=True)
class ReferenceChain:
    """
    Опорная цепь для аппроксимации нормирующей константы

    Attributes:
        draws: Массив (m, d) состояний Y_i
        log_h: log h(Y_i), длина m
        kind: Способ генерации
        space: Пространство состояний целевой модели; точки вне него получают вес 0
    """
    draws: np.ndarray
    log_h: np.ndarray
    kind: ReferenceKind
    space: Optional[StateSpace] = None
    _features: Dict[int, Tuple[FeatureMap, np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        if self.draws.ndim != 2 or self.draws.shape[0] < 1:
            raise ValueError("draws должен быть массивом (m, d) с m >= 1")
        if self.log_h.shape != (self.draws.shape[0],):
            raise ValueError("Длина log_h должна совпадать с числом точек цепи")
        if not np.all(np.isfinite(self.log_h)):
            raise ValueError("log_h содержит нечисловые значения")

    @property
    def m(self) -> int:
        return self.draws.shape[0]

    def feature_matrix(self, fm: FeatureMap) -> Tuple[np.ndarray, np.ndarray]:
        """
        Признаки phi(Y_i), вычисленные один раз на отображение

        Returns:
            (features, support): матрица (m, p), строки вне пространства нулевые,
            и булева маска принадлежности пространству
        """
        cached = self._features.get(id(fm))
        if cached is not None and cached[0] is fm:
            return cached[1], cached[2]
        space = self.space or fm.space
        support = space.contains(self.draws) if space is not None else np.ones(self.m, dtype=bool)
        features = np.zeros((self.m, fm.p))
        if support.any():
            features[support] = fm.eval_batch(self.draws[support])
        self._features[id(fm)] = (fm, features, support)
        return features, support

    def subset(self, rows) -> "ReferenceChain":
        """Часть цепи по номерам точек (независимые опорные выборки для половин разбиения)"""
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size == 0:
            raise ValueError("Пустая часть опорной цепи")
        return ReferenceChain(self.draws[rows], self.log_h[rows], self.kind, self.space)


@dataclass(frozen=True)
class ObservedSample:
    """
    Наблюдаемая выборка X_1..X_n

    Attributes:
        draws: Массив (n, d)
        features: Матрица phi(X_i), (n, p)
        mean_features: Средний вектор признаков
        acceptance_rate: Доля принятых шагов Метрополиса (nan для внешних данных)
    """
    draws: np.ndarray
    features: np.ndarray
    mean_features: np.ndarray
    acceptance_rate: float = float("nan")

    @classmethod
    def from_draws(cls, fm: FeatureMap, draws, acceptance_rate: float = float("nan")) -> "ObservedSample":
        draws = np.asarray(draws, dtype=float)
        if draws.ndim == 1:
            draws = draws.reshape(-1, fm.d)
        if draws.shape[0] < 1:
            raise ValueError("Пустая выборка")
        features = fm.eval_batch(draws)
        return cls(draws, features, features.mean(axis=0), acceptance_rate)

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "ObservedSample":
        """Подвыборка по номерам строк (для кросс-валидации и разбиений)"""
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size == 0:
            raise ValueError("Пустая подвыборка")
        features = self.features[rows]
        return ObservedSample(self.draws[rows], features, features.mean(axis=0), self.acceptance_rate)


def samples_to_frame(draws: np.ndarray, log_h: Optional[np.ndarray] = None) -> pd.DataFrame:
    """Таблица для CSV: одна строка на точку, колонки x0..x{d-1} (+ log_h)"""
    draws = np.atleast_2d(draws)
    frame = pd.DataFrame(draws, columns=[f"x{k}" for k in range(draws.shape[1])])
    if log_h is not None:
        frame["log_h"] = log_h
    return frame


def load_draws_csv(path: str) -> np.ndarray:
    """Читает наблюдения из CSV с колонками x0..x{d-1}"""
    frame = pd.read_csv(path)
    columns = [c for c in frame.columns if c.startswith("x") and c[1:].isdigit()]
    if not columns:
        raise ValueError(f"{path}: нет колонок x0..x{{d-1}}")
    columns.sort(key=lambda c: int(c[1:]))
    return frame[columns].to_numpy(dtype=float)
