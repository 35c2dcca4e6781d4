"""
Переборные оракулы для правил отбора: прямой подсчет без векторизации
"""
import math
from typing import Sequence


def exhaustive_mirror_cutoff(m_values: Sequence[float], q: float) -> float:
    """
    Порог tau_q перебором по {|M_j|} и +inf с прямым подсчетом FDP_hat

    Args:
        m_values: Зеркальные статистики (nan пропускаются)
        q: Уровень

    Returns:
        Наименьший порог t > 0 с FDP_hat(t) <= q
    """
    values = [float(v) for v in m_values if not math.isnan(float(v))]
    thresholds = sorted({abs(v) for v in values if v != 0.0}) + [math.inf]
    for t in thresholds:
        if math.isinf(t):
            return math.inf
        negatives = sum(1 for v in values if v < -t)
        positives = sum(1 for v in values if v > t)
        if positives == 0:
            ratio = 0.0 if negatives == 0 else math.inf
        else:
            ratio = negatives / positives
        if ratio <= q:
            return t
    return math.inf


def exhaustive_ebh_kstar(e_values: Sequence[float], q: float) -> int:
    """k* = max{k : k e_(k) / p >= 1/q} перебором всех k"""
    ordered = sorted((float(e) for e in e_values), reverse=True)
    p = len(ordered)
    k_star = 0
    for k in range(1, p + 1):
        if k * ordered[k - 1] / p >= 1.0 / q:
            k_star = k
    return k_star
