"""
e-BH по e-значениям одношаговых оценок на всей выборке:

    E_k = sqrt(pi/2) * sqrt(n H_k|-k) * |theta_tilde_k - theta0_k|  (0 при H <= 0)
    k* = max{k : k e_(k) / p >= 1/q},  max пустого = 0
"""
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_fdr_logger
from inference import InferenceResult
from .selection import SelectionResult, check_level

logger = get_fdr_logger()


@dataclass(frozen=True)
class EValueSet:
    """
    Attributes:
        e_values: e_k >= 0
        order: Перестановка по убыванию e (ничьи - по возрастанию номера)
        k_star: Число отвергаемых гипотез
    """
    e_values: np.ndarray
    order: np.ndarray
    k_star: int


def evalues_from_estimates(alpha_tilde, h_hat, n, null_values=None) -> np.ndarray:
    """
    e-значения по столбцам одношаговых оценок (nan или H <= 0 дают 0)

    Args:
        alpha_tilde: Одношаговые оценки
        h_hat: Оценки H_k|-k
        n: Размер выборки (число или вектор)
        null_values: theta_k при H0 (по умолчанию нули)
    """
    alpha_tilde = np.asarray(alpha_tilde, dtype=float)
    h_hat = np.asarray(h_hat, dtype=float)
    null_values = np.zeros_like(alpha_tilde) if null_values is None else np.asarray(null_values, dtype=float)
    n = np.broadcast_to(np.asarray(n, dtype=float), alpha_tilde.shape)
    defined = np.isfinite(alpha_tilde) & np.isfinite(h_hat) & (h_hat > 0)
    e_values = np.zeros_like(alpha_tilde)
    e_values[defined] = (
        np.sqrt(np.pi / 2.0) * np.sqrt(n[defined] * h_hat[defined])
        * np.abs(alpha_tilde[defined] - null_values[defined])
    )
    return e_values


def compute_evalues(results: Sequence[InferenceResult], null_values=None) -> np.ndarray:
    """e-значения по результатам вывода (в порядке индексов координат), n заменяется на n_eff"""
    p = len(results)
    alpha_tilde = np.full(p, np.nan)
    h_hat = np.full(p, np.nan)
    n = np.zeros(p)
    for r in results:
        if r.ci_defined:
            alpha_tilde[r.target_index] = r.alpha_tilde
            h_hat[r.target_index] = r.h_hat
        n[r.target_index] = r.n * r.variance_scale
    return evalues_from_estimates(alpha_tilde, h_hat, n, null_values)


def ebh_from_evalues(e_values, q: float) -> EValueSet:
    """
    Порог e-BH по готовому вектору e-значений

    Args:
        e_values: Неотрицательные e-значения
        q: Уровень FDR
    """
    q = check_level(q)
    e_values = np.asarray(e_values, dtype=float)
    if np.any(e_values < 0) or not np.all(np.isfinite(e_values)):
        raise ValueError("e-значения должны быть конечными и неотрицательными")
    p = e_values.size
    order = np.lexsort((np.arange(p), -e_values))
    ranks = np.arange(1, p + 1)
    passing = np.nonzero(ranks * e_values[order] / p >= 1.0 / q)[0]
    k_star = int(ranks[passing[-1]]) if passing.size else 0
    return EValueSet(e_values, order, k_star)


def null_evalue_mean(e_values, null_set: Iterable[int]) -> float:
    """Среднее e-значение по заявленному множеству нулевых координат (диагностика)"""
    idx = np.asarray(sorted(int(j) for j in null_set), dtype=np.int64)
    if idx.size == 0:
        return float("nan")
    return float(np.asarray(e_values, dtype=float)[idx].mean())


def ebh_select(inference: Sequence[InferenceResult], null_values, q: float,
               null_set: Optional[Iterable[int]] = None) -> SelectionResult:
    """
    e-BH отбор: отвергаются k* наибольших e-значений

    Args:
        inference: InferenceResult по всем координатам
        null_values: theta_k при H0
        q: Уровень FDR
        null_set: Известные нулевые координаты (режим симуляции) для диагностики

    Returns:
        SelectionResult(method="ebh") с k_star в diagnostics
    """
    return select_from_evalues(compute_evalues(inference, null_values), q, null_set)


def select_from_evalues(e_values, q: float, null_set: Optional[Iterable[int]] = None) -> SelectionResult:
    """e-BH отбор по готовому вектору e-значений"""
    e_values = np.asarray(e_values, dtype=float)
    evs = ebh_from_evalues(e_values, q)
    selected = np.sort(evs.order[:evs.k_star])
    diagnostics = {"k_star": evs.k_star, "evalues": evs}
    if null_set is not None:
        diagnostics["null_evalue_mean"] = null_evalue_mean(e_values, null_set)
    logger.debug(f"[OK] e-BH: k*={evs.k_star} из {e_values.size}")
    return SelectionResult(selected=selected, method="ebh", q=q, statistics=e_values, diagnostics=diagnostics)
