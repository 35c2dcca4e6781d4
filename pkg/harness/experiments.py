"""
Симуляционные эксперименты: ошибка l1, покрытие интервалов, FDR и мощность отбора

Каждая ячейка (n, p) повторяется cfg.replications раз; повтор с номером r
использует зерно cfg.seed.child(n).child(p).child(r), так что результат
не зависит от числа потоков. Упавший повтор записывается со status="failed".
"""
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd
from scipy.stats import kstest

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_harness_logger
from fdr import (
    MirrorConfig,
    ebh_select,
    false_discovery_proportion,
    mirror_select,
    multi_split_select,
    split_and_infer,
    true_positive_rate,
)
from inference import infer_all, one_step_estimate
from samplers import RngSeed
from .experiment_config import ExperimentConfig
from .pipeline import SPLIT_STREAM, cell_seed, fit_model, simulate_dataset

logger = get_harness_logger()

RECORD_COLUMNS = ["scenario", "n", "p", "replication_id", "seed_used", "status", "error"]

METRICS = {
    "l1_error": ["l1_error", "support_size", "converged", "lambda1", "lambda2", "ess", "acceptance_rate"],
    "coverage": ["theta_star", "alpha_tilde", "ci_lo", "ci_hi", "ci_defined", "covered",
                 "s_stat", "p_value", "rejected", "h_hat"],
    "fdr": ["n_true", "fdp_single_split", "power_single_split", "discoveries_single_split",
            "fdp_ebh", "power_ebh", "discoveries_ebh", "null_evalue_mean",
            "fdp_multi_split", "power_multi_split", "discoveries_multi_split"],
}


@dataclass
class ExperimentRecord:
    """Одна строка длинного формата: метрика одного повтора"""
    scenario: str
    n: int
    p: int
    replication_id: int
    metric_name: str
    metric_value: float
    seed_used: int
    status: str


def _run_l1_error(cfg: ExperimentConfig, n: int, p: int, seed: RngSeed) -> Dict[str, float]:
    data = simulate_dataset(cfg, n, p, seed)
    model = fit_model(cfg, data, seed)
    return {
        "l1_error": float(np.mean(np.abs(model.fit.theta_hat - data.theta_star))),
        "support_size": model.fit.support_size,
        "converged": float(model.fit.converged),
        "lambda1": model.penalty.lambda1,
        "lambda2": model.penalty.lambda2,
        "ess": model.fit.ess,
        "acceptance_rate": data.obs.acceptance_rate,
    }


def _run_coverage(cfg: ExperimentConfig, n: int, p: int, seed: RngSeed) -> Dict[str, float]:
    data = simulate_dataset(cfg, n, p, seed)
    model = fit_model(cfg, data, seed)
    j = cfg.target_index
    truth = float(data.theta_star[j])
    # Тест H0: theta_j = theta*_j верен, одношаговая оценка от alpha0 не зависит
    result = one_step_estimate(data.fm, data.obs, data.ref, model.fit.theta_hat, j,
                               model.penalty.lambda_prime, model.penalty, eta=cfg.eta, alpha0=truth,
                               mc_correction=cfg.mc_correction)
    covered = result.ci_defined and result.ci_lo <= truth <= result.ci_hi
    return {
        "theta_star": truth,
        "alpha_tilde": result.alpha_tilde,
        "ci_lo": result.ci_lo,
        "ci_hi": result.ci_hi,
        "ci_defined": float(result.ci_defined),
        "covered": float(covered) if result.ci_defined else np.nan,
        "s_stat": result.s_stat,
        "p_value": result.p_value,
        "rejected": float(result.p_value < cfg.eta),
        "h_hat": result.h_hat,
    }


def _run_fdr(cfg: ExperimentConfig, n: int, p: int, seed: RngSeed) -> Dict[str, float]:
    data = simulate_dataset(cfg, n, p, seed)
    model = fit_model(cfg, data, seed)
    nulls = np.zeros(p)
    null_set = np.setdiff1d(np.arange(p), data.support)

    t1, t2 = split_and_infer(data.fm, data.obs, data.ref, model.penalty, nulls,
                             seed.child(SPLIT_STREAM), eta=cfg.eta, mc_correction=cfg.mc_correction,
                             split_reference=cfg.split_reference)
    mirror_cfg = MirrorConfig(cfg.f_kind, cfg.q, max(cfg.n_splits, 1), seed.child(SPLIT_STREAM))
    single = mirror_select(t1, t2, mirror_cfg)

    inference = infer_all(data.fm, data.obs, data.ref, model.fit.theta_hat,
                          model.penalty.lambda_prime, model.penalty, null_values=nulls, eta=cfg.eta,
                          mc_correction=cfg.mc_correction)
    ebh = ebh_select(inference, nulls, cfg.q, null_set=null_set)

    row = {
        "n_true": float(data.support.size),
        "fdp_single_split": false_discovery_proportion(single.selected, data.support),
        "power_single_split": true_positive_rate(single.selected, data.support),
        "discoveries_single_split": float(single.selected.size),
        "fdp_ebh": false_discovery_proportion(ebh.selected, data.support),
        "power_ebh": true_positive_rate(ebh.selected, data.support),
        "discoveries_ebh": float(ebh.selected.size),
        "null_evalue_mean": ebh.diagnostics.get("null_evalue_mean", np.nan),
        "fdp_multi_split": np.nan,
        "power_multi_split": np.nan,
        "discoveries_multi_split": np.nan,
    }
    if cfg.n_splits >= 2:
        multi = multi_split_select(data.fm, data.obs, data.ref, model.penalty, mirror_cfg, nulls, eta=cfg.eta,
                                   mc_correction=cfg.mc_correction,
                                   split_reference=cfg.split_reference)
        row["fdp_multi_split"] = false_discovery_proportion(multi.selected, data.support)
        row["power_multi_split"] = true_positive_rate(multi.selected, data.support)
        row["discoveries_multi_split"] = float(multi.selected.size)
    return row


RUNNERS: Dict[str, Callable[[ExperimentConfig, int, int, RngSeed], Dict[str, float]]] = {
    "l1_error": _run_l1_error,
    "coverage": _run_coverage,
    "fdr": _run_fdr,
}


def _replication(cfg: ExperimentConfig, runner, n: int, p: int, rep: int) -> Dict:
    seed = cell_seed(cfg, n, p, rep)
    record = {
        "scenario": cfg.scenario, "n": n, "p": p, "replication_id": rep,
        "seed_used": seed.stream, "status": "ok", "error": "",
    }
    started = time.perf_counter()
    try:
        record.update(runner(cfg, n, p, seed))
    except Exception as e:
        logger.error(f"[ERROR] n={n}, p={p}, повтор {rep}: {type(e).__name__}: {e}")
        record["status"] = "failed"
        record["error"] = f"{type(e).__name__}: {e}"
    record["seconds"] = time.perf_counter() - started
    return record


def run_replications(cfg: ExperimentConfig) -> pd.DataFrame:
    """
    Все повторы всех ячеек эксперимента cfg.experiment

    Returns:
        Широкая таблица: одна строка на повтор, столбцы RECORD_COLUMNS + метрики
    """
    runner = RUNNERS[cfg.experiment]
    tasks = [(n, p, rep) for n, p in cfg.cells for rep in range(cfg.replications)]
    logger.info(
        f"[STEP 1] {cfg.experiment}: {len(cfg.cells)} ячеек x {cfg.replications} повторов, "
        f"сценарий {cfg.scenario}, потоков {cfg.threads}"
    )

    def task(args):
        n, p, rep = args
        record = _replication(cfg, runner, n, p, rep)
        logger.info(f"[REP] n={n}, p={p}, повтор {rep}: {record['status']} ({record['seconds']:.1f} с)")
        return record

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
            records = list(executor.map(task, tasks))
    else:
        records = [task(t) for t in tasks]

    frame = pd.DataFrame(records).reindex(columns=RECORD_COLUMNS + METRICS[cfg.experiment])
    failed = int((frame["status"] == "failed").sum())
    if failed:
        logger.warning(f"[WARN] Упавших повторов: {failed} из {len(frame)}")
    logger.info(f"[OK] {cfg.experiment}: {len(frame)} повторов завершено")
    return frame


def long_records(frame: pd.DataFrame, experiment: str) -> List[ExperimentRecord]:
    """Широкая таблица повторов -> записи (метрика, значение)"""
    out = []
    for row in frame.to_dict("records"):
        for metric in METRICS[experiment]:
            out.append(ExperimentRecord(
                row["scenario"], int(row["n"]), int(row["p"]), int(row["replication_id"]),
                metric, float(row[metric]) if pd.notna(row[metric]) else float("nan"),
                int(row["seed_used"]), row["status"],
            ))
    return out


def _ok(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["status"] == "ok"]


def summarize_l1_error(frame: pd.DataFrame) -> pd.DataFrame:
    """Средняя ошибка l1: строки n, столбцы p"""
    return _ok(frame).pivot_table(index="n", columns="p", values="l1_error", aggfunc="mean")


def summarize_coverage(frame: pd.DataFrame, eta: float) -> pd.DataFrame:
    """
    Покрытие и доля отклонений score-теста по ячейкам

    Неопределенные интервалы не входят в знаменатель покрытия и считаются отдельно;
    ks_distance - расстояние Колмогорова S до N(0, 1).
    """
    rows = []
    for (n, p), cell in frame.groupby(["n", "p"], sort=True):
        ok = _ok(cell)
        defined = ok[ok["ci_defined"] == 1.0]
        s_values = ok["s_stat"].dropna().to_numpy()
        rows.append({
            "n": n,
            "p": p,
            "replications": len(cell),
            "failed": int((cell["status"] == "failed").sum()),
            "undefined": int((ok["ci_defined"] == 0.0).sum()),
            "coverage": float(defined["covered"].mean()) if len(defined) else np.nan,
            "nominal": 1.0 - eta,
            "rejection_rate": float(ok["rejected"].mean()) if len(ok) else np.nan,
            "ks_distance": float(kstest(s_values, "norm").statistic) if s_values.size else np.nan,
        })
    return pd.DataFrame(rows)


def summarize_fdr(frame: pd.DataFrame) -> pd.DataFrame:
    """Средние FDP, мощность и число открытий по ячейкам и процедурам"""
    metrics = [m for m in METRICS["fdr"] if m != "n_true"]
    summary = _ok(frame).groupby(["n", "p"], sort=True)[metrics].mean().reset_index()
    return summary


def fdr_pair_table(summary: pd.DataFrame) -> pd.DataFrame:
    """Таблица пар "(FDR одного разбиения, FDR e-BH)": строки n, столбцы p"""
    cells = summary.assign(
        pair=[f"({a:.3f}, {b:.3f})" for a, b in zip(summary["fdp_single_split"], summary["fdp_ebh"])]
    )
    return cells.pivot(index="n", columns="p", values="pair")


def _run_and_save(cfg: ExperimentConfig) -> Tuple[Dict[str, str], pd.DataFrame]:
    from .export import records_frame, save_frame
    from .plots import plot_coverage_curve, plot_fdr_power, plot_l1_error

    out = Path(cfg.output_dir)
    frame = run_replications(cfg)
    files = {
        "replications": save_frame(frame, str(out / "replications.csv")),
        "records": save_frame(records_frame(long_records(frame, cfg.experiment)), str(out / "records.csv")),
    }

    if cfg.experiment == "l1_error":
        table = summarize_l1_error(frame)
        files["table"] = save_frame(table, str(out / "table_l1_error.csv"), index=True)
        if cfg.plots and not table.empty:
            files["plot"] = plot_l1_error(table, str(out / "l1_error.png"))
    elif cfg.experiment == "coverage":
        table = summarize_coverage(frame, cfg.eta)
        files["curve"] = save_frame(table, str(out / "coverage_curve.csv"))
        if cfg.plots:
            files["plot"] = plot_coverage_curve(table, str(out / "coverage.png"))
    else:
        table = summarize_fdr(frame)
        files["summary"] = save_frame(table, str(out / "fdr_summary.csv"))
        files["table"] = save_frame(fdr_pair_table(table), str(out / "table_fdr.csv"), index=True)
        if cfg.plots and not table.empty:
            files["plot"] = plot_fdr_power(table, str(out / "fdr_power.png"), cfg.q)

    return {k: v for k, v in files.items() if v}, table


def run_experiment(cfg: ExperimentConfig) -> Dict[str, str]:
    """
    Запускает эксперимент cfg.experiment и сохраняет таблицы в cfg.output_dir

    Files:
        replications.csv   одна строка на повтор
        records.csv        длинный формат (метрика, значение)
        table_l1_error.csv / coverage_curve.csv / fdr_summary.csv, table_fdr.csv
        *.png              при cfg.plots

    Returns:
        Словарь имя -> путь записанного файла
    """
    return _run_and_save(cfg)[0]


def run_l1_error_experiment(cfg: ExperimentConfig) -> pd.DataFrame:
    """Средняя ошибка p^-1 ||theta_hat - theta*||_1 по ячейкам: строки n, столбцы p"""
    return _run_and_save(cfg.with_overrides(experiment="l1_error"))[1]


def run_coverage_experiment(cfg: ExperimentConfig) -> pd.DataFrame:
    """Кривая покрытия и доли отклонений по ячейкам (n, p)"""
    return _run_and_save(cfg.with_overrides(experiment="coverage"))[1]


def run_fdr_experiment(cfg: ExperimentConfig) -> pd.DataFrame:
    """Средние FDP, мощность и число открытий по ячейкам и процедурам"""
    return _run_and_save(cfg.with_overrides(experiment="fdr"))[1]
