"""
Графики по сводным таблицам экспериментов (matplotlib, без дисплея)
"""
import os
import sys
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_harness_logger

logger = get_harness_logger()


def _save(fig, filename: str) -> Optional[str]:
    try:
        os.makedirs(os.path.dirname(filename) if os.path.dirname(filename) else ".", exist_ok=True)
        fig.savefig(filename, dpi=120, bbox_inches="tight")
        logger.info(f"График сохранен: {filename}")
        return filename
    except Exception as e:
        logger.error(f"Ошибка при сохранении графика {filename}: {e}")
        return None
    finally:
        plt.close(fig)


def plot_coverage_curve(summary: pd.DataFrame, filename: str) -> Optional[str]:
    """Покрытие по n для каждого p с линией номинала 1 - eta"""
    fig, ax = plt.subplots(figsize=(6, 4))
    for p, cell in summary.groupby("p"):
        ax.plot(cell["n"], cell["coverage"], marker="o", label=f"p={p}")
    if len(summary):
        ax.axhline(summary["nominal"].iloc[0], color="gray", linestyle="--", label="номинал")
    ax.set_xlabel("n")
    ax.set_ylabel("покрытие")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    return _save(fig, filename)


def plot_l1_error(table: pd.DataFrame, filename: str) -> Optional[str]:
    """Средняя ошибка l1 по n для каждого p (вход - сводная таблица n x p)"""
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in table.columns:
        ax.plot(table.index, table[p], marker="o", label=f"p={p}")
    ax.set_xlabel("n")
    ax.set_ylabel("mean |theta_hat - theta*|")
    ax.legend()
    return _save(fig, filename)


def plot_fdr_power(summary: pd.DataFrame, filename: str, q: float) -> Optional[str]:
    """FDP и мощность процедур по n (усреднение по p)"""
    by_n = summary.groupby("n").mean(numeric_only=True)
    fig, (ax_fdp, ax_power) = plt.subplots(1, 2, figsize=(10, 4))
    for method in ("single_split", "ebh", "multi_split"):
        if by_n[f"fdp_{method}"].notna().any():
            ax_fdp.plot(by_n.index, by_n[f"fdp_{method}"], marker="o", label=method)
            ax_power.plot(by_n.index, by_n[f"power_{method}"], marker="o", label=method)
    ax_fdp.axhline(q, color="gray", linestyle="--", label="q")
    ax_fdp.set_xlabel("n")
    ax_fdp.set_ylabel("FDP")
    ax_power.set_xlabel("n")
    ax_power.set_ylabel("мощность")
    ax_fdp.legend()
    return _save(fig, filename)
