"""
Разбиение наблюдаемых строк на две половины и нормированные оценки

    T_j = (alpha_tilde_j - theta0_j) * sqrt(n H_j|-j / 2),

где n - размер всей выборки (с поправкой на опорную цепь n умножается на
n_eff / n половины). Опорная цепь по умолчанию общая для обеих половин;
с split_reference половины получают непересекающиеся части цепи, и ошибки
Монте-Карло T1 и T2 становятся независимыми.
"""
import sys
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_fdr_logger
from inference import InferenceResult, infer_all
from mrf import FeatureMap, check_theta
from samplers import ObservedSample, ReferenceChain, RngSeed
from solver import PenaltyConfig, solve

logger = get_fdr_logger()


def normalized_statistics(results: Sequence[InferenceResult], null_values, n: int) -> np.ndarray:
    """
    T_j по результатам вывода одной половины; nan для координат с H <= 0

    Args:
        results: InferenceResult по всем p координатам в порядке индексов
        null_values: Гипотетические значения theta_j
        n: Размер полной выборки
    """
    null_values = np.asarray(null_values, dtype=float)
    t = np.full(len(results), np.nan)
    for r in results:
        if r.ci_defined:
            t[r.target_index] = (
                (r.alpha_tilde - null_values[r.target_index]) * np.sqrt(n * r.variance_scale * r.h_hat / 2.0)
            )
    return t


def half_split(n: int, seed: RngSeed) -> Tuple[np.ndarray, np.ndarray]:
    """Случайное разбиение на половины размеров floor(n/2) и ceil(n/2)"""
    if n < 4:
        raise ValueError(f"Для разбиения нужно n >= 4, получено {n}")
    perm = seed.generator().permutation(n)
    half = n // 2
    return np.sort(perm[:half]), np.sort(perm[half:])


def split_and_infer(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    cfg: PenaltyConfig,
    null_values,
    seed: RngSeed,
    eta: float = 0.05,
    max_workers: int = 1,
    mc_correction: bool = False,
    split_reference: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Полный конвейер на каждой половине: Elastic-net, одношаговые оценки, T_j

    Args:
        fm: Отображение признаков
        obs: Наблюдаемая выборка (n >= 4)
        ref: Опорная цепь
        cfg: Штраф для theta_hat (lambda1, lambda2) и программ w_hat (lambda')
        null_values: theta_j при H0 (нули для отбора признаков)
        seed: Зерно разбиения
        eta: Уровень интервалов (на T_j не влияет)
        max_workers: Потоков для вывода по координатам
        mc_correction: Поправка дисперсии на ошибку Монте-Карло опорной цепи
        split_reference: Первая и вторая половины точек цепи достаются разным половинам данных (m >= 2)

    Returns:
        (t1, t2)
    """
    null_values = check_theta(null_values, fm.p)
    halves = half_split(obs.n, seed)
    if split_reference:
        if ref.m < 2:
            raise ValueError(f"Для разбиения опорной цепи нужно m >= 2, получено {ref.m}")
        ref_halves = (ref.subset(np.arange(ref.m // 2)), ref.subset(np.arange(ref.m // 2, ref.m)))
    else:
        ref_halves = (ref, ref)
    stats = []
    for k, (rows, part_ref) in enumerate(zip(halves, ref_halves), 1):
        part = obs.subset(rows)
        fit = solve(fm, part, part_ref, cfg)
        results = infer_all(fm, part, part_ref, fit.theta_hat, cfg.lambda_prime, cfg, null_values=null_values,
                            eta=eta, max_workers=max_workers, mc_correction=mc_correction)
        t = normalized_statistics(results, null_values, obs.n)
        undefined = np.nonzero(np.isnan(t))[0]
        if undefined.size:
            logger.warning(f"[WARN] Половина {k}: статистика не определена для {undefined.tolist()}")
        stats.append(t)
    return stats[0], stats[1]
