"""
Конфигурация экспериментов: TOML-файл + переопределения из CLI + переменные окружения (.env)

Схема файла описана в README.md; примеры лежат в config/.
"""
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

from dotenv import load_dotenv

from mrf import BASE_MEASURES, BUILTIN_IDS, StateSpace, default_space
from samplers import RngSeed

load_dotenv()

ExperimentKind = Literal["l1_error", "coverage", "fdr"]
EXPERIMENT_KINDS = ("l1_error", "coverage", "fdr")

# Короткие имена сценариев -> встроенные отображения
SCENARIO_ALIASES = {"phi1": "cos", "phi2": "arctan", "phi3": "rational"}


def default_threads() -> int:
    """Число потоков по умолчанию из MRF_THREADS"""
    value = os.getenv("MRF_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise ValueError(f"MRF_THREADS должен быть целым числом, получено '{value}'")


@dataclass(frozen=True)
class CVSettings:
    """
    Attributes:
        folds: Число фолдов
        n_lambda: Точек сетки lambda1
        ridge_ratios: Отношения lambda2 / lambda1
        scale: Множитель порядка sqrt(log p / n)
        max_iter: Предел итераций решателя
        tol: Допуск решателя
    """
    folds: int = 5
    n_lambda: int = 8
    ridge_ratios: Tuple[float, ...] = (0.1, 1.0)
    scale: float = 1.0
    max_iter: int = 5000
    tol: float = 1e-8


@dataclass(frozen=True)
class SamplerSettings:
    """Гиперпараметры Метрополиса"""
    proposal_sd: float = 1.0
    burn_in: int = 1000
    thin: int = 10


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Описание эксперимента

    Attributes:
        experiment: "l1_error", "coverage" или "fdr"
        scenario: Отображение признаков ("cos", "arctan", "rational")
        n_grid: Размеры выборки
        p_grid: Размерности
        m_fixed: Фиксированная длина опорной цепи (None: m = n)
        replications: Повторов на ячейку
        q: Уровень FDR
        eta: Уровень непокрытия интервалов
        sparsity_prob: Вероятность ненулевой координаты theta*
        seed: Корневое зерно
        cv: Параметры кросс-валидации
        sampler: Параметры Метрополиса
        box: Бокс состояний (None: бокс сценария по умолчанию)
        base_measure: Базовая мера бокса ("gaussian" или "lebesgue")
        mc_correction: Учитывать ошибку Монте-Карло опорной цепи в интервалах и T_j
        target_index: Координата эксперимента покрытия
        n_splits: Разбиений для отбора по частотам включения (0 - не запускать)
        f_kind: Функция f зеркальной статистики
        split_reference: Половины разбиения получают непересекающиеся части опорной цепи
        threads: Потоков для повторов
        output_dir: Каталог результатов
        plots: Сохранять PNG-графики
    """
    experiment: ExperimentKind = "l1_error"
    scenario: str = "cos"
    n_grid: Tuple[int, ...] = (500,)
    p_grid: Tuple[int, ...] = (50,)
    m_fixed: Optional[int] = None
    replications: int = 20
    q: float = 0.05
    eta: float = 0.05
    sparsity_prob: float = 0.1
    seed: RngSeed = RngSeed(2024)
    cv: CVSettings = field(default_factory=CVSettings)
    sampler: SamplerSettings = field(default_factory=SamplerSettings)
    box: Optional[Tuple[float, float]] = None
    base_measure: str = "gaussian"
    mc_correction: bool = True
    target_index: int = 0
    n_splits: int = 0
    f_kind: str = "product"
    split_reference: bool = True
    threads: int = 1
    output_dir: str = "results"
    plots: bool = True

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ValueError(f"Неизвестный эксперимент: {self.experiment}. Доступны: {EXPERIMENT_KINDS}")
        if self.scenario not in BUILTIN_IDS:
            raise ValueError(f"Неизвестный сценарий: {self.scenario}. Доступны: {BUILTIN_IDS}")
        if not self.n_grid or not self.p_grid:
            raise ValueError("Сетки n_grid и p_grid не должны быть пустыми")
        if min(self.n_grid) < 2 or min(self.p_grid) < 1:
            raise ValueError(f"Требуется n >= 2 и p >= 1: n_grid={self.n_grid}, p_grid={self.p_grid}")
        if self.m_fixed is not None and self.m_fixed < 1:
            raise ValueError(f"m должен быть >= 1, получено {self.m_fixed}")
        if self.replications < 1:
            raise ValueError(f"replications должен быть >= 1, получено {self.replications}")
        for name in ("q", "eta", "sparsity_prob"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} должен лежать в (0, 1), получено {value}")
        if self.cv.folds < 2:
            raise ValueError(f"Число фолдов должно быть >= 2, получено {self.cv.folds}")
        if self.threads < 1:
            raise ValueError(f"threads должен быть >= 1, получено {self.threads}")
        if self.n_splits < 0 or self.n_splits == 1:
            raise ValueError(f"n_splits должен быть 0 или >= 2, получено {self.n_splits}")
        if self.target_index < 0 or self.target_index >= min(self.p_grid):
            raise ValueError(f"target_index={self.target_index} вне [0, {min(self.p_grid)})")
        if self.base_measure not in BASE_MEASURES:
            raise ValueError(f"Неизвестная базовая мера: {self.base_measure}. Доступны: {BASE_MEASURES}")

    def m_for(self, n: int) -> int:
        """Длина опорной цепи для ячейки с размером выборки n"""
        return n if self.m_fixed is None else self.m_fixed

    def space(self) -> StateSpace:
        if self.box is None:
            default = default_space(self.scenario)
            lo, hi = default.lo[0], default.hi[0]
        else:
            lo, hi = self.box
        return StateSpace.box(1, lo, hi, base=self.base_measure)

    @property
    def cells(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((n, p) for n in self.n_grid for p in self.p_grid)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Копия с переопределенными полями (значения None пропускаются)"""
        values = {k: v for k, v in overrides.items() if v is not None}
        if "seed" in values and not isinstance(values["seed"], RngSeed):
            values["seed"] = RngSeed(int(values["seed"]))
        return replace(self, **values)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        """Конфигурация из словаря со схемой TOML-файла"""
        raw = dict(raw)
        kwargs: Dict[str, Any] = {}
        scenario = str(raw.pop("scenario", "cos")).lower()
        kwargs["scenario"] = SCENARIO_ALIASES.get(scenario, scenario)
        for key in ("experiment", "output_dir", "f_kind", "base_measure"):
            if key in raw:
                kwargs[key] = str(raw.pop(key))
        for key in ("replications", "target_index", "n_splits", "threads"):
            if key in raw:
                kwargs[key] = int(raw.pop(key))
        for key in ("q", "eta"):
            if key in raw:
                kwargs[key] = float(raw.pop(key))
        for key in ("plots", "mc_correction"):
            if key in raw:
                kwargs[key] = bool(raw.pop(key))
        if "n_grid" in raw:
            kwargs["n_grid"] = tuple(int(v) for v in raw.pop("n_grid"))
        if "p_grid" in raw:
            kwargs["p_grid"] = tuple(int(v) for v in raw.pop("p_grid"))
        m_rule = raw.pop("m", "n")
        kwargs["m_fixed"] = None if m_rule == "n" else int(m_rule)
        if "seed" in raw:
            seed = raw.pop("seed")
            kwargs["seed"] = RngSeed(int(seed)) if not isinstance(seed, dict) else RngSeed(int(seed["seed"]), int(seed.get("stream", 0)))
        if "box" in raw:
            lo, hi = raw.pop("box")
            kwargs["box"] = (float(lo), float(hi))
        sparsity = raw.pop("sparsity", {})
        if "prob" in sparsity:
            kwargs["sparsity_prob"] = float(sparsity["prob"])
        cv = raw.pop("cv", {})
        if cv:
            if "ridge_ratios" in cv:
                cv = {**cv, "ridge_ratios": tuple(float(v) for v in cv["ridge_ratios"])}
            kwargs["cv"] = CVSettings(**cv)
        sampler = raw.pop("sampler", {})
        if sampler:
            kwargs["sampler"] = SamplerSettings(**sampler)
        fdr = raw.pop("fdr", {})
        if "n_splits" in fdr:
            kwargs["n_splits"] = int(fdr["n_splits"])
        if "f_kind" in fdr:
            kwargs["f_kind"] = str(fdr["f_kind"])
        if "split_reference" in fdr:
            kwargs["split_reference"] = bool(fdr["split_reference"])
        if "threads" not in kwargs:
            kwargs["threads"] = default_threads()
        if raw:
            raise ValueError(f"Неизвестные ключи конфигурации: {sorted(raw)}")
        return cls(**kwargs)

    @classmethod
    def from_toml(cls, path, **overrides) -> "ExperimentConfig":
        """
        Читает TOML-файл и применяет переопределения CLI

        Args:
            path: Путь к файлу
            overrides: seed, threads, output_dir и другие поля (None пропускаются)
        """
        path = Path(path)
        if not path.exists():
            raise ValueError(f"Файл конфигурации не найден: {path}")
        with open(path, "rb") as f:
            try:
                raw = tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ValueError(f"{path}: ошибка разбора TOML - {e}")
        return cls.from_dict(raw).with_overrides(**overrides)
