"""
Сохранение результатов в CSV
"""
import os
import sys
from pathlib import Path
from typing import Optional

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_harness_logger

logger = get_harness_logger()


def save_frame(frame: pd.DataFrame, filename: str, index: bool = False) -> Optional[str]:
    """
    Сохраняет таблицу в CSV, создавая каталог

    Args:
        frame: Таблица
        filename: Путь к файлу
        index: Записывать индекс (для сводных таблиц)

    Returns:
        Путь к файлу
    """
    os.makedirs(os.path.dirname(filename) if os.path.dirname(filename) else ".", exist_ok=True)
    frame.to_csv(filename, index=index, float_format="%.10g")
    logger.info(f"Результаты сохранены в файл: {filename}")
    return filename


def records_frame(records) -> pd.DataFrame:
    """Список ExperimentRecord -> таблица длинного формата"""
    return pd.DataFrame([vars(r) for r in records], columns=[
        "scenario", "n", "p", "replication_id", "metric_name", "metric_value", "seed_used", "status",
    ])
