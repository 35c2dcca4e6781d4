"""
Отбор по частотам включения при многократных разбиениях:

    I_j = K^-1 sum_k 1(j in S_k) / |S_k|  (вклад 0 при пустом S_k)

Сортировка I_(1) <= ... <= I_(p), наибольшее l с I_(1) + ... + I_(l) <= q,
отбор {j: I_j > I_(l)}; при l = 0 порог равен 0.
"""
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_fdr_logger
from mrf import FeatureMap
from samplers import ObservedSample, ReferenceChain
from solver import PenaltyConfig
from .mirror import MirrorConfig, mirror_select
from .selection import SelectionResult, check_level
from .splitting import split_and_infer

logger = get_fdr_logger()


def inclusion_rate_select(rates, q: float) -> SelectionResult:
    """
    Отбор по заданному вектору частот включения

    Args:
        rates: Вектор I_j
        q: Уровень FDR

    Returns:
        SelectionResult(method="multi_split")
    """
    q = check_level(q)
    rates = np.asarray(rates, dtype=float)
    ordered = np.sort(rates)
    prefix = np.cumsum(ordered)
    ell = int(np.count_nonzero(prefix <= q))
    threshold = float(ordered[ell - 1]) if ell > 0 else 0.0
    selected = np.nonzero(rates > threshold)[0]
    return SelectionResult(
        selected=selected,
        method="multi_split",
        q=q,
        statistics=rates,
        diagnostics={"inclusion_rates": rates, "ell": ell, "threshold": threshold},
    )


def multi_split_select(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    penalty: PenaltyConfig,
    cfg: MirrorConfig,
    null_values,
    eta: float = 0.05,
    max_workers: int = 1,
    mc_correction: bool = False,
    split_reference: bool = False,
) -> SelectionResult:
    """
    Многократные разбиения: split_and_infer + mirror_select на подпотоках cfg.seed.child(k)

    Args:
        penalty: Штраф для подгонок на половинах
        cfg: Зеркальная конфигурация с n_splits >= 2
        mc_correction, split_reference: Передаются в split_and_infer

    Returns:
        SelectionResult с вектором I_j в statistics
    """
    if cfg.n_splits < 2:
        raise ValueError(f"Для многократных разбиений нужно n_splits >= 2, получено {cfg.n_splits}")

    def one_split(k: int):
        t1, t2 = split_and_infer(fm, obs, ref, penalty, null_values, cfg.seed.child(k), eta,
                                 mc_correction=mc_correction, split_reference=split_reference)
        return mirror_select(t1, t2, cfg).selected

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            selections = list(executor.map(one_split, range(cfg.n_splits)))
    else:
        selections = [one_split(k) for k in range(cfg.n_splits)]

    rates = np.zeros(fm.p)
    for chosen in selections:
        if chosen.size:
            rates[chosen] += 1.0 / chosen.size
    rates /= cfg.n_splits

    result = inclusion_rate_select(rates, cfg.q)
    result.diagnostics["split_sizes"] = [int(s.size) for s in selections]
    logger.info(f"[OK] {cfg.n_splits} разбиений, отобрано {result.selected.size} координат")
    return result
