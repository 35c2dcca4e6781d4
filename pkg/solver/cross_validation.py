"""
K-fold кросс-валидация по наблюдаемым строкам; опорная цепь общая для всех фолдов.
Критерий - нештрафованная L_n^m на отложенном фолде в оценке, подобранной на остальных.
"""
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_solver_logger
from likelihood import eval_loss
from mrf import FeatureMap
from samplers import ObservedSample, ReferenceChain, RngSeed
from .elastic_net import FitResult, PenaltyConfig, solve, solve_path

logger = get_solver_logger()


@dataclass(frozen=True)
class CVRow:
    """
    Attributes:
        config: Конфигурация штрафа
        fold_losses: Потери на каждом отложенном фолде
        mean_loss: Средняя потеря
    """
    config: PenaltyConfig
    fold_losses: Tuple[float, ...]
    mean_loss: float


def fold_indices(n: int, folds: int, seed: RngSeed) -> List[np.ndarray]:
    """Случайное разбиение номеров 0..n-1 на folds почти равных частей"""
    if folds < 2:
        raise ValueError(f"Число фолдов должно быть >= 2, получено {folds}")
    if folds > n:
        raise ValueError(f"Число фолдов {folds} больше числа наблюдений {n}")
    perm = seed.generator().permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def _fold_losses(fm, obs, ref, grid, heldout) -> List[float]:
    train_rows = np.setdiff1d(np.arange(obs.n), heldout)
    train = obs.subset(train_rows)
    test = obs.subset(heldout)
    fits = solve_path(fm, train, ref, grid)
    return [eval_loss(fm, fit.theta_hat, test, ref) for fit in fits]


def cross_validate(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    grid: Sequence[PenaltyConfig],
    folds: int = 5,
    seed: RngSeed = RngSeed(0),
    max_workers: int = 1,
) -> Tuple[PenaltyConfig, List[CVRow]]:
    """
    Выбор (lambda1, lambda2, lambda') по средней отложенной потере

    Args:
        fm: Отображение признаков
        obs: Наблюдаемая выборка
        ref: Опорная цепь (не пересэмплируется по фолдам)
        grid: Непустой список конфигураций
        folds: Число фолдов
        seed: Зерно разбиения
        max_workers: Потоков для параллельной обработки фолдов

    Returns:
        (best, cv_table): лучшая конфигурация (ничьи - в пользу большего lambda1,
        затем большего lambda2) и таблица по всем конфигурациям
    """
    grid = list(grid)
    if not grid:
        raise ValueError("Пустая сетка параметров")
    parts = fold_indices(obs.n, folds, seed)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            per_fold = list(executor.map(lambda part: _fold_losses(fm, obs, ref, grid, part), parts))
    else:
        per_fold = [_fold_losses(fm, obs, ref, grid, part) for part in parts]

    table = []
    for k, cfg in enumerate(grid):
        losses = tuple(float(fold[k]) for fold in per_fold)
        table.append(CVRow(cfg, losses, float(np.mean(losses))))

    chosen = best_row(table)
    logger.info(
        f"[OK] CV: {len(grid)} конфигураций x {folds} фолдов, lambda1={chosen.config.lambda1:.4g}, "
        f"lambda2={chosen.config.lambda2:.4g}, потеря={chosen.mean_loss:.5f}"
    )
    return chosen.config, table


def fit_with_cv(
    fm: FeatureMap,
    obs: ObservedSample,
    ref: ReferenceChain,
    grid: Sequence[PenaltyConfig],
    folds: int = 5,
    seed: RngSeed = RngSeed(0),
    max_workers: int = 1,
) -> Tuple[FitResult, PenaltyConfig, List[CVRow]]:
    """Кросс-валидация и итоговая подгонка на всей выборке с выбранной конфигурацией"""
    if len(grid) == 1:
        best, table = grid[0], []
    else:
        best, table = cross_validate(fm, obs, ref, grid, folds, seed, max_workers)
    return solve(fm, obs, ref, best), best, table


def cv_table_frame(table: Sequence[CVRow]) -> pd.DataFrame:
    """Таблица для CSV: lambda1, lambda2, lambda_prime, потери по фолдам, mean"""
    rows = []
    for row in table:
        record = {
            "lambda1": row.config.lambda1,
            "lambda2": row.config.lambda2,
            "lambda_prime": row.config.lambda_prime,
        }
        for k, loss in enumerate(row.fold_losses):
            record[f"fold_{k}"] = loss
        record["mean"] = row.mean_loss
        rows.append(record)
    return pd.DataFrame(rows)


def best_row(table: Sequence[CVRow]) -> Optional[CVRow]:
    """Строка с минимальной средней потерей по тем же правилам разрешения ничьих"""
    if not table:
        return None
    return min(table, key=lambda row: (row.mean_loss, -row.config.lambda1, -row.config.lambda2))
