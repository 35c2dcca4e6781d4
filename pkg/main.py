"""
Командная строка: подгонка, вывод, отбор признаков, симуляции и самопроверка

    python main.py fit      [--config F] [--data CSV]           -> fit.csv, cv_table.csv
    python main.py infer    [--config F] [--data CSV] [--targets 0,3]   -> inference.csv
    python main.py select   --method single-split|multi-split|ebh [--q Q] [--statistics CSV]
    python main.py simulate --config config/l1_error.toml [--experiment l1|coverage|fdr]
    python main.py verify

Общие флаги: --config, --seed, --threads, --output-dir.
Коды возврата: 0 - успех, 1 - ошибка входных данных, 2 - внутренняя ошибка
(в том числе проваленная самопроверка).
"""
import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

# Добавляем корень проекта в путь для импорта
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from logger_config import get_cli_logger
from fdr import (
    MirrorConfig,
    compute_evalues,
    evalues_from_estimates,
    inclusion_rate_select,
    mirror_select,
    multi_split_select,
    select_from_evalues,
    selection_frame,
    split_and_infer,
)
from harness import ExperimentConfig, fit_model, prepare_dataset, run_experiment
from harness.export import save_frame
from harness.pipeline import SPLIT_STREAM
from inference import infer_all, inference_frame
from solver import PenaltyConfig, cv_table_frame, fit_result_frame

logger = get_cli_logger()

EXPERIMENT_NAMES = {"l1": "l1_error", "l1_error": "l1_error", "coverage": "coverage", "fdr": "fdr"}
SELECT_METHODS = ("single-split", "multi-split", "ebh")


class CLIParser(argparse.ArgumentParser):
    """Ошибки разбора аргументов завершаются кодом 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: ошибка: {message}\n")
        sys.exit(1)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML-файл эксперимента")
    common.add_argument("--seed", type=int, help="Корневое зерно")
    common.add_argument("--threads", type=int, help="Число потоков (по умолчанию MRF_THREADS)")
    common.add_argument("--output-dir", dest="output_dir", help="Каталог результатов")
    return common


def _data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", help="CSV наблюдений с колонками x0..; без флага данные симулируются")
    parser.add_argument("--lambda1", type=float, help="Фиксированный lambda1 (без кросс-валидации)")
    parser.add_argument("--lambda2", type=float, default=0.0, help="lambda2 при фиксированном lambda1")
    parser.add_argument("--lambda-prime", dest="lambda_prime", type=float,
                        help="lambda' для программ w_hat (по умолчанию lambda1)")


def build_parser() -> CLIParser:
    common = _common_flags()
    parser = CLIParser(prog="main.py", description="Штрафованная MCMC-MLE, декоррелированный вывод и контроль FDR")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CLIParser)

    fit = commands.add_parser("fit", parents=[common], help="Elastic-net оценка theta с кросс-валидацией")
    _data_flags(fit)

    infer = commands.add_parser("infer", parents=[common], help="Score-тесты и интервалы по координатам")
    _data_flags(infer)
    infer.add_argument("--targets", help="Номера координат через запятую (по умолчанию все)")
    infer.add_argument("--eta", type=float, help="Уровень непокрытия интервалов")

    select = commands.add_parser("select", parents=[common], help="Отбор признаков с контролем FDR")
    _data_flags(select)
    select.add_argument("--method", choices=SELECT_METHODS, required=True)
    select.add_argument("--q", type=float, help="Уровень FDR")
    select.add_argument("--n-splits", dest="n_splits", type=int, help="Разбиений для multi-split")
    select.add_argument("--statistics", help="CSV готовых статистик: e_value | alpha_tilde,h_hat,n | t1,t2 | inclusion_rate")

    simulate = commands.add_parser("simulate", parents=[common], help="Симуляционный эксперимент")
    simulate.add_argument("--experiment", choices=sorted(EXPERIMENT_NAMES), help="Переопределяет experiment из конфигурации")
    simulate.add_argument("--no-plots", dest="no_plots", action="store_true", help="Не сохранять графики")

    commands.add_parser("verify", parents=[common], help="Самопроверка по точным оракулам")
    return parser


def load_config(args) -> ExperimentConfig:
    """Конфигурация из --config (или значения по умолчанию) с переопределениями из флагов"""
    overrides = {"seed": args.seed, "threads": args.threads, "output_dir": args.output_dir}
    if getattr(args, "experiment", None):
        overrides["experiment"] = EXPERIMENT_NAMES[args.experiment]
    if getattr(args, "no_plots", False):
        overrides["plots"] = False
    if getattr(args, "eta", None) is not None:
        overrides["eta"] = args.eta
    if getattr(args, "q", None) is not None:
        overrides["q"] = args.q
    if getattr(args, "n_splits", None) is not None:
        overrides["n_splits"] = args.n_splits
    if args.config:
        return ExperimentConfig.from_toml(args.config, **overrides)
    return ExperimentConfig.from_dict({}).with_overrides(**overrides)


def _fixed_grid(args, cfg: ExperimentConfig) -> Optional[List[PenaltyConfig]]:
    if args.lambda1 is None:
        return None
    lambda_prime = args.lambda1 if args.lambda_prime is None else args.lambda_prime
    return [PenaltyConfig(args.lambda1, args.lambda2, lambda_prime, max_iter=cfg.cv.max_iter, tol=cfg.cv.tol)]


def _fit(args, cfg: ExperimentConfig):
    data = prepare_dataset(cfg, args.data)
    model = fit_model(cfg, data, cfg.seed, grid=_fixed_grid(args, cfg), max_workers=cfg.threads)
    return data, model


def cmd_fit(args, cfg: ExperimentConfig) -> int:
    _, model = _fit(args, cfg)
    out = Path(cfg.output_dir)
    save_frame(fit_result_frame(model.fit, model.penalty), str(out / "fit.csv"))
    if model.cv_table:
        save_frame(cv_table_frame(model.cv_table), str(out / "cv_table.csv"))
    logger.info(
        f"[OK] theta_hat: носитель {model.fit.support_size}, "
        f"KKT={model.fit.kkt_residual:.2e}, сошелся={model.fit.converged}"
    )
    return 0


def _parse_targets(raw: Optional[str], p: int) -> Optional[List[int]]:
    if not raw:
        return None
    try:
        targets = [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"--targets: ожидались номера через запятую, получено '{raw}'")
    bad = [j for j in targets if not 0 <= j < p]
    if bad:
        raise ValueError(f"--targets: номера {bad} вне [0, {p})")
    return targets


def cmd_infer(args, cfg: ExperimentConfig) -> int:
    data, model = _fit(args, cfg)
    targets = _parse_targets(args.targets, data.fm.p)
    results = infer_all(data.fm, data.obs, data.ref, model.fit.theta_hat, model.penalty.lambda_prime,
                        model.penalty, targets=targets, eta=cfg.eta, max_workers=cfg.threads,
                        mc_correction=cfg.mc_correction)
    save_frame(inference_frame(results), str(Path(cfg.output_dir) / "inference.csv"))
    return 0


def _select_from_statistics(path: str, method: str, cfg: ExperimentConfig):
    """Отбор по готовым статистикам из CSV"""
    if not Path(path).exists():
        raise ValueError(f"Файл статистик не найден: {path}")
    frame = pd.read_csv(path)
    if "index" in frame.columns:
        frame = frame.sort_values("index")
    columns = set(frame.columns)
    if method == "ebh":
        if "e_value" in columns:
            return select_from_evalues(frame["e_value"].to_numpy(dtype=float), cfg.q)
        if {"alpha_tilde", "h_hat", "n"} <= columns:
            n = frame["n_eff"] if "n_eff" in columns else frame["n"]
            e_values = evalues_from_estimates(frame["alpha_tilde"], frame["h_hat"], n)
            return select_from_evalues(e_values, cfg.q)
        raise ValueError(f"{path}: для ebh нужны колонки e_value или alpha_tilde, h_hat, n")
    if method == "single-split":
        if not {"t1", "t2"} <= columns:
            raise ValueError(f"{path}: для single-split нужны колонки t1, t2")
        mirror_cfg = MirrorConfig(cfg.f_kind, cfg.q, 1, cfg.seed)
        return mirror_select(frame["t1"].to_numpy(dtype=float), frame["t2"].to_numpy(dtype=float), mirror_cfg)
    if "inclusion_rate" not in columns:
        raise ValueError(f"{path}: для multi-split нужна колонка inclusion_rate")
    return inclusion_rate_select(frame["inclusion_rate"].to_numpy(dtype=float), cfg.q)


def cmd_select(args, cfg: ExperimentConfig) -> int:
    if args.statistics:
        result = _select_from_statistics(args.statistics, args.method, cfg)
    else:
        data, model = _fit(args, cfg)
        nulls = np.zeros(data.fm.p)
        if args.method == "ebh":
            inference = infer_all(data.fm, data.obs, data.ref, model.fit.theta_hat, model.penalty.lambda_prime,
                                  model.penalty, null_values=nulls, eta=cfg.eta, max_workers=cfg.threads,
                                  mc_correction=cfg.mc_correction)
            result = select_from_evalues(compute_evalues(inference, nulls), cfg.q)
        elif args.method == "single-split":
            split_seed = cfg.seed.child(SPLIT_STREAM)
            t1, t2 = split_and_infer(data.fm, data.obs, data.ref, model.penalty, nulls, split_seed,
                                     eta=cfg.eta, max_workers=cfg.threads, mc_correction=cfg.mc_correction,
                                     split_reference=cfg.split_reference)
            result = mirror_select(t1, t2, MirrorConfig(cfg.f_kind, cfg.q, 1, split_seed))
        else:
            n_splits = cfg.n_splits if cfg.n_splits >= 2 else 10
            mirror_cfg = MirrorConfig(cfg.f_kind, cfg.q, n_splits, cfg.seed.child(SPLIT_STREAM))
            result = multi_split_select(data.fm, data.obs, data.ref, model.penalty, mirror_cfg, nulls, eta=cfg.eta,
                                        max_workers=cfg.threads, mc_correction=cfg.mc_correction,
                                        split_reference=cfg.split_reference)
    save_frame(selection_frame(result), str(Path(cfg.output_dir) / "selection.csv"))
    logger.info(f"[OK] {args.method}: отобрано {result.selected.size} координат: {result.selected.tolist()}")
    return 0


def cmd_simulate(args, cfg: ExperimentConfig) -> int:
    files = run_experiment(cfg)
    for name, path in files.items():
        logger.info(f"  -> {name}: {path}")
    return 0


def cmd_verify(args, cfg: ExperimentConfig) -> int:
    from oracles.verify import run_verify_suite

    results = run_verify_suite()
    frame = pd.DataFrame([vars(r) for r in results])
    save_frame(frame, str(Path(cfg.output_dir) / "verify.csv"))
    passed = sum(r.passed for r in results)
    logger.info(f"Пройдено {passed} из {len(results)} проверок")
    return 0 if passed == len(results) else 2


COMMANDS = {
    "fit": cmd_fit,
    "infer": cmd_infer,
    "select": cmd_select,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Точка входа командной строки

    Args:
        argv: Аргументы без имени программы (по умолчанию sys.argv[1:])

    Returns:
        Код возврата
    """
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_config(args)
        code = COMMANDS[args.command](args, cfg)
    except ValueError as e:
        logger.error(f"ОШИБКА ВХОДНЫХ ДАННЫХ: {e}")
        return 1
    except KeyboardInterrupt:
        logger.info("ОСТАНОВЛЕНО ПОЛЬЗОВАТЕЛЕМ")
        return 2
    except Exception as e:
        logger.error(f"ОШИБКА: {e}", exc_info=True)
        return 2
    logger.info(f"Команда {args.command} завершена за {time.perf_counter() - started:.1f} с")
    return code


if __name__ == "__main__":
    sys.exit(cli_main())
