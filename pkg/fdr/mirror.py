"""
Зеркальные статистики по одному разбиению данных:

    M_j = sgn(T1_j T2_j) f(|T1_j|, |T2_j|)
    FDP_hat(t) = #{j: M_j < -t} / #{j: M_j > t}
    tau_q = min{t из {|M_j|} : FDP_hat(t) <= q},  S = {j: M_j > tau_q}

Соглашения: 0/0 = 0, x/0 = +inf; без подходящего порога tau_q = +inf.
Координаты с неопределенной статистикой (nan) исключаются.
"""
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_fdr_logger
from samplers import RngSeed
from .selection import SelectionResult, check_level

logger = get_fdr_logger()

MirrorKind = Literal["product", "sum"]


@dataclass(frozen=True)
class MirrorConfig:
    """
    Attributes:
        f_kind: "product" f(u, v) = uv или "sum" f(u, v) = u + v
        q: Уровень FDR
        n_splits: Число разбиений (1 - одно разбиение)
        seed: Зерно разбиений
    """
    f_kind: MirrorKind = "product"
    q: float = 0.05
    n_splits: int = 1
    seed: RngSeed = RngSeed(0)

    def __post_init__(self):
        check_level(self.q)
        if self.f_kind not in ("product", "sum"):
            raise ValueError(f"Неизвестная функция f: {self.f_kind}")
        if self.n_splits < 1:
            raise ValueError(f"n_splits должен быть >= 1, получено {self.n_splits}")


@dataclass(frozen=True)
class MirrorStatistics:
    """
    Attributes:
        m_values: M_j (nan для исключенных координат)
        t1, t2: Нормированные оценки двух половин
        tau_q: Порог
        fdp_hat_curve: Пары (t, FDP_hat(t)) по всем кандидатам
    """
    m_values: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    tau_q: float
    fdp_hat_curve: List[Tuple[float, float]]


def mirror_statistics(t1, t2, f_kind: MirrorKind = "product") -> np.ndarray:
    """M_j = sgn(t1_j t2_j) f(|t1_j|, |t2_j|); nan, если одна из статистик не определена"""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if t1.shape != t2.shape or t1.ndim != 1:
        raise ValueError(f"Длины t1 и t2 не совпадают: {t1.shape} и {t2.shape}")
    a, b = np.abs(t1), np.abs(t2)
    magnitude = a * b if f_kind == "product" else a + b
    return np.sign(t1 * t2) * magnitude


def _fdp_hat(neg: np.ndarray, pos: np.ndarray) -> np.ndarray:
    out = np.full(neg.shape, np.inf)
    both_zero = (neg == 0) & (pos == 0)
    out[both_zero] = 0.0
    has_pos = pos > 0
    out[has_pos] = neg[has_pos] / pos[has_pos]
    return out


def mirror_cutoff(m_values: np.ndarray, q: float) -> Tuple[float, List[Tuple[float, float]]]:
    """
    Порог tau_q по кандидатам {|M_j|} > 0

    Returns:
        (tau_q, fdp_hat_curve)
    """
    valid = m_values[np.isfinite(m_values)]
    candidates = np.unique(np.abs(valid))
    candidates = candidates[candidates > 0]
    if candidates.size == 0:
        return float("inf"), []
    ordered = np.sort(valid)
    neg = np.searchsorted(ordered, -candidates, side="left")
    pos = ordered.size - np.searchsorted(ordered, candidates, side="right")
    fdp = _fdp_hat(neg, pos)
    curve = [(float(t), float(v)) for t, v in zip(candidates, fdp)]
    passing = np.nonzero(fdp <= q)[0]
    tau = float(candidates[passing[0]]) if passing.size else float("inf")
    return tau, curve


def mirror_select(t1, t2, cfg: MirrorConfig) -> SelectionResult:
    """
    Отбор по зеркальным статистикам одного разбиения

    Args:
        t1, t2: Нормированные оценки T_j двух половин данных
        cfg: Функция f и уровень q

    Returns:
        SelectionResult(method="single_split") c tau_q и MirrorStatistics в diagnostics
    """
    m_values = mirror_statistics(t1, t2, cfg.f_kind)
    excluded = np.nonzero(~np.isfinite(m_values))[0]
    if excluded.size:
        logger.warning(f"[WARN] Исключены координаты без статистики: {excluded.tolist()}")
    tau, curve = mirror_cutoff(m_values, cfg.q)
    with np.errstate(invalid="ignore"):
        selected = np.nonzero(np.isfinite(m_values) & (m_values > tau))[0]
    stats = MirrorStatistics(m_values, np.asarray(t1, dtype=float), np.asarray(t2, dtype=float), tau, curve)
    logger.debug(f"[OK] tau_q={tau:.4g}, отобрано {selected.size} из {m_values.size}")
    return SelectionResult(
        selected=selected,
        method="single_split",
        q=cfg.q,
        statistics=m_values,
        diagnostics={"tau_q": tau, "mirror": stats, "excluded": excluded.tolist()},
    )
