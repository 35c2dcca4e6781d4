"""
Пакетный вывод по набору координат с общим гессианом в theta_hat
"""
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_inference_logger
from likelihood import curvature_at
from mrf import FeatureMap, check_theta
from samplers import ObservedSample, ReferenceChain
from solver import PenaltyConfig
from .decorrelated import InferenceResult, infer_coordinate

logger = get_inference_logger()


def infer_all(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    theta_hat,
    lambda_prime: float,
    solver_cfg: PenaltyConfig,
    targets: Optional[Sequence[int]] = None,
    null_values=None,
    eta: float = 0.05,
    max_workers: int = 1,
    mc_correction: bool = False,
) -> List[InferenceResult]:
    """
    Вывод по координатам targets (по умолчанию все p) с одной подгонкой theta_hat

    Args:
        fm: Отображение признаков
        obs: Наблюдаемая выборка
        ref: Опорная цепь
        theta_hat: Штрафованная оценка
        lambda_prime: Вес l1-штрафа программ w_hat
        solver_cfg: Параметры оптимизатора программ w_hat
        targets: Номера координат
        null_values: Проверяемые значения theta_j (по умолчанию нули), длина p
        eta: Уровень непокрытия интервалов
        max_workers: Потоков для независимых программ w_hat
        mc_correction: Учитывать ошибку Монте-Карло опорной цепи в дисперсии U

    Returns:
        Список InferenceResult в порядке targets
    """
    theta_hat = check_theta(theta_hat, fm.p)
    targets = list(range(fm.p)) if targets is None else [int(j) for j in targets]
    null_values = np.zeros(fm.p) if null_values is None else check_theta(null_values, fm.p)
    curvature = curvature_at(fm, theta_hat, ref)

    def task(j: int) -> InferenceResult:
        return infer_coordinate(
            fm, obs, ref, theta_hat, j, lambda_prime, solver_cfg,
            alpha0=float(null_values[j]), eta=eta, curvature=curvature, mc_correction=mc_correction,
        )

    if max_workers > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(task, targets))
    else:
        results = [task(j) for j in targets]

    undefined = sum(not r.ci_defined for r in results)
    logger.info(f"[OK] Вывод по {len(results)} координатам, неопределенных интервалов: {undefined}")
    return results


def inference_frame(results: Sequence[InferenceResult]) -> pd.DataFrame:
    """Таблица для CSV: одна строка на координату"""
    return pd.DataFrame([
        {
            "index": r.target_index,
            "alpha_hat": r.alpha_hat,
            "alpha_tilde": r.alpha_tilde,
            "h_hat": r.h_hat,
            "s_stat": r.s_stat,
            "p_value": r.p_value,
            "ci_lo": r.ci_lo,
            "ci_hi": r.ci_hi,
            "ci_defined": r.ci_defined,
            "n": r.n,
            "n_eff": r.n_eff,
        }
        for r in results
    ], columns=["index", "alpha_hat", "alpha_tilde", "h_hat", "s_stat", "p_value",
                "ci_lo", "ci_hi", "ci_defined", "n", "n_eff"])
