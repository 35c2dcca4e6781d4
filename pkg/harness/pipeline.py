"""
Один прогон конвейера: истинный theta*, данные Метрополиса, опорная цепь, подгонка с CV
"""
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_harness_logger
from mrf import FeatureMap, builtin_feature_map
from samplers import (
    ObservedSample,
    ReferenceChain,
    RngSeed,
    load_draws_csv,
    metropolis_sample,
    sample_reference_gaussian,
)
from solver import CVRow, FitResult, PenaltyConfig, default_penalty_grid, fit_with_cv
from .experiment_config import ExperimentConfig
from .truth import generate_truth

logger = get_harness_logger()

# Подпотоки зерна одного прогона
TRUTH_STREAM = 0
DATA_STREAM = 1
REFERENCE_STREAM = 2
CV_STREAM = 3
SPLIT_STREAM = 4


@dataclass
class Dataset:
    """
    Attributes:
        fm: Отображение признаков
        obs: Наблюдаемая выборка
        ref: Опорная цепь
        theta_star: Истинный параметр (None для пользовательских данных)
        support: Носитель theta* (None для пользовательских данных)
    """
    fm: FeatureMap
    obs: ObservedSample
    ref: ReferenceChain
    theta_star: Optional[np.ndarray] = None
    support: Optional[np.ndarray] = None


@dataclass
class FittedModel:
    fit: FitResult
    penalty: PenaltyConfig
    cv_table: List[CVRow]


def cell_seed(cfg: ExperimentConfig, n: int, p: int, replication: int) -> RngSeed:
    """Зерно повтора: подпотоки корневого зерна по n, p и номеру повтора"""
    return cfg.seed.child(n).child(p).child(replication)


def simulate_dataset(cfg: ExperimentConfig, n: int, p: int, seed: RngSeed) -> Dataset:
    """
    Синтетические данные сценария cfg.scenario

    Наблюдения берутся из p(.|theta*) Метрополисом, опорная цепь:
    m независимых точек N(0, 1), суженного на бокс сценария.
    """
    fm = builtin_feature_map(cfg.scenario, p, cfg.space())
    theta_star, support = generate_truth(p, cfg.sparsity_prob, seed.child(TRUTH_STREAM))
    obs = metropolis_sample(
        fm, theta_star, n,
        proposal_sd=cfg.sampler.proposal_sd,
        burn_in=cfg.sampler.burn_in,
        thin=cfg.sampler.thin,
        seed=seed.child(DATA_STREAM),
        space=fm.space,
    )
    ref = sample_reference_gaussian(cfg.m_for(n), fm.d, seed.child(REFERENCE_STREAM), fm.space)
    return Dataset(fm, obs, ref, theta_star, support)


def load_dataset(cfg: ExperimentConfig, data_path: str, seed: RngSeed) -> Dataset:
    """
    Пользовательские наблюдения из CSV (столбцы x0..x{d-1}) под отображением cfg.scenario

    Размерность p берется из первой точки p_grid, длина опорной цепи - по правилу m.
    """
    draws = load_draws_csv(data_path)
    fm = builtin_feature_map(cfg.scenario, cfg.p_grid[0], cfg.space())
    if not np.all(fm.space.contains(draws)):
        raise ValueError(f"{data_path}: наблюдения вне бокса [{fm.space.lo[0]}, {fm.space.hi[0]}]")
    obs = ObservedSample.from_draws(fm, draws)
    ref = sample_reference_gaussian(cfg.m_for(obs.n), fm.d, seed.child(REFERENCE_STREAM), fm.space)
    logger.info(f"[DATA] Загружено {obs.n} наблюдений из {data_path}")
    return Dataset(fm, obs, ref)


def prepare_dataset(cfg: ExperimentConfig, data_path: Optional[str] = None) -> Dataset:
    """Данные для команд fit/infer/select: файл или симуляция первой ячейки сетки"""
    if data_path:
        return load_dataset(cfg, data_path, cfg.seed)
    n, p = cfg.cells[0]
    logger.info(f"[DATA] Симуляция: {cfg.scenario}, n={n}, p={p}, m={cfg.m_for(n)}")
    return simulate_dataset(cfg, n, p, cfg.seed)


def penalty_grid(cfg: ExperimentConfig, data: Dataset) -> List[PenaltyConfig]:
    return default_penalty_grid(
        data.obs.n, data.ref.m, data.fm.p,
        n_lambda=cfg.cv.n_lambda,
        ridge_ratios=cfg.cv.ridge_ratios,
        scale=cfg.cv.scale,
        max_iter=cfg.cv.max_iter,
        tol=cfg.cv.tol,
    )


def fit_model(cfg: ExperimentConfig, data: Dataset, seed: RngSeed,
              grid: Optional[List[PenaltyConfig]] = None, max_workers: int = 1) -> FittedModel:
    """Elastic-net с выбором штрафа кросс-валидацией по сетке (по умолчанию penalty_grid)"""
    grid = grid if grid is not None else penalty_grid(cfg, data)
    fit, best, table = fit_with_cv(
        data.fm, data.obs, data.ref, grid,
        folds=cfg.cv.folds, seed=seed.child(CV_STREAM), max_workers=max_workers,
    )
    if not fit.converged:
        logger.warning(f"[WARN] Решатель не сошелся: KKT={fit.kkt_residual:.2e}, итераций {fit.iterations}")
    return FittedModel(fit, best, table)
