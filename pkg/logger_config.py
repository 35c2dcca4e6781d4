import logging
import sys
from logging.handlers import RotatingFileHandler
import os
from typing import Optional

from dotenv import load_dotenv

# Уровень и каталог логов можно задать в .env
load_dotenv()


def setup_logger(name: str, log_file: Optional[str] = None, level: Optional[str] = None):
    """
    Настройка логгера с выводом в консоль и файл

    Args:
        name: Имя логгера (обычно имя пакета)
        log_file: Путь к файлу логов (опционально)
        level: Уровень логирования (DEBUG, INFO, WARNING, ERROR),
            по умолчанию берется из MRF_LOG_LEVEL
    """
    level = level or os.getenv("MRF_LOG_LEVEL", "INFO")
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    # Избегаем дублирования хендлеров
    if logger.handlers:
        return logger

    # Формат логов
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Консольный вывод
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # Файловый вывод (если указан путь)
    if log_file:
        os.makedirs(os.path.dirname(log_file), exist_ok=True)

        # Ротация логов: максимум 10MB, до 5 файлов
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def _log_file(name: str) -> Optional[str]:
    """Путь к файлу логов модуля; пустой MRF_LOG_DIR отключает запись в файл"""
    log_dir = os.getenv("MRF_LOG_DIR", "logs")
    if not log_dir:
        return None
    return os.path.join(log_dir, f"{name}.log")


# Готовые логгеры для модулей
def get_model_logger():
    return setup_logger('mrf', _log_file('mrf'))

def get_sampler_logger():
    return setup_logger('samplers', _log_file('samplers'))

def get_likelihood_logger():
    return setup_logger('likelihood', _log_file('likelihood'))

def get_solver_logger():
    return setup_logger('solver', _log_file('solver'))

def get_inference_logger():
    return setup_logger('inference', _log_file('inference'))

def get_fdr_logger():
    return setup_logger('fdr', _log_file('fdr'))

def get_oracle_logger():
    return setup_logger('oracles', _log_file('oracles'))

def get_harness_logger():
    return setup_logger('harness', _log_file('harness'))

def get_cli_logger():
    return setup_logger('cli', _log_file('cli'))
