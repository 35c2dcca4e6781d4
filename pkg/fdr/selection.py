"""
Общие типы результатов отбора и метрики FDP / мощности
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Literal

import numpy as np
import pandas as pd

SelectionMethod = Literal["single_split", "multi_split", "ebh"]


@dataclass(frozen=True)
class SelectionResult:
    """
    Attributes:
        selected: Отсортированные номера отобранных координат
        method: Процедура отбора
        q: Целевой уровень FDR
        statistics: Статистика по координатам (M_j, I_j или e_j)
        diagnostics: tau_q / вектор I_j / k_star и прочее
    """
    selected: np.ndarray
    method: SelectionMethod
    q: float
    statistics: np.ndarray
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def selected_set(self) -> frozenset:
        return frozenset(int(j) for j in self.selected)


def check_level(q: float) -> float:
    if not 0 < q < 1:
        raise ValueError(f"Уровень q должен лежать в (0, 1), получено {q}")
    return float(q)


def false_discovery_proportion(selected: Iterable[int], support: Iterable[int]) -> float:
    """Доля ложных открытий; 0 при пустом отборе"""
    selected = set(int(j) for j in selected)
    if not selected:
        return 0.0
    return len(selected - set(int(j) for j in support)) / len(selected)


def true_positive_rate(selected: Iterable[int], support: Iterable[int]) -> float:
    """Мощность: доля найденных ненулевых координат; 0 при пустом носителе"""
    support = set(int(j) for j in support)
    if not support:
        return 0.0
    return len(support & set(int(j) for j in selected)) / len(support)


def selection_frame(result: SelectionResult) -> pd.DataFrame:
    """Таблица для CSV: (index, statistic, selected, method, q)"""
    p = result.statistics.shape[0]
    chosen = np.zeros(p, dtype=bool)
    chosen[result.selected] = True
    return pd.DataFrame({
        "index": np.arange(p),
        "statistic": result.statistics,
        "selected": chosen,
        "method": result.method,
        "q": result.q,
    })
