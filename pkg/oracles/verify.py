"""
Набор самопроверок установки: каждая проверка сравнивает модуль пакета
с независимым оракулом на малом примере
"""
import itertools
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from logger_config import get_oracle_logger
from fdr import MirrorConfig, ebh_from_evalues, mirror_select, mirror_statistics
from inference import fit_w_hat
from likelihood import eval_grad, eval_hess, eval_loss, hess_vector_product, log_normalizer_estimate
from mrf import (StateSpace, brute_force_log_C, brute_force_moments, builtin_feature_map,
                 ising_feature_map)
from samplers import RngSeed, metropolis_sample, sample_reference_gaussian, sample_reference_uniform
from solver import PenaltyConfig, soft_threshold, solve
from oracles.dense import dense_newton_solve, dense_w_hat
from oracles.finite_diff import FiniteDiffSpec, fd_gradient, fd_hessian, fd_scalar_hessian
from oracles.sweeps import exhaustive_ebh_kstar, exhaustive_mirror_cutoff

logger = get_oracle_logger()

# Случайных векторов в сверке mirror_select с перебором порогов
MIRROR_SWEEP_SIZE = 1000


@dataclass(frozen=True)
class CheckResult:
    """
    Attributes:
        name: Название проверки
        passed: Пройдена ли
        detail: Измеренное расхождение / пояснение
        seconds: Время выполнения
    """
    name: str
    passed: bool
    detail: str
    seconds: float


def _small_instance(p: int = 5, n: int = 300, m: int = 400, seed: int = 11):
    fm = builtin_feature_map("cos", p)
    theta_star = np.zeros(p)
    theta_star[0] = 0.8
    obs = metropolis_sample(fm, theta_star, n, burn_in=200, thin=2, seed=RngSeed(seed, 1))
    ref = sample_reference_gaussian(m, 1, RngSeed(seed, 2), fm.space)
    return fm, obs, ref


def _check_log_c() -> Tuple[bool, str]:
    space = StateSpace.discrete(3, 2)
    fm = ising_feature_map(3)
    theta = np.array([0.4, -0.7, 0.25])
    naive = 0.0
    for state in itertools.product((0, 1), repeat=3):
        naive += np.exp(fm.eval(state) @ theta)
    exact = np.exp(brute_force_log_C(fm, theta, space))
    rel = abs(exact - naive) / naive
    return rel <= 1e-12, f"отн. расхождение {rel:.2e}"


def _check_moments() -> Tuple[bool, str]:
    space = StateSpace.discrete(3, 2)
    fm = ising_feature_map(3, with_fields=True)
    theta = np.linspace(-0.5, 0.5, fm.p)
    mean, cov = brute_force_moments(fm, theta, space)
    fd_mean = fd_gradient(lambda t: brute_force_log_C(fm, t, space), theta)
    fd_cov = fd_scalar_hessian(lambda t: brute_force_log_C(fm, t, space), theta)
    err_mean = np.abs(fd_mean - mean).max()
    err_cov = np.abs(fd_cov - cov).max()
    return err_mean <= 1e-6 * max(1.0, np.abs(mean).max()) and err_cov <= 1e-5, \
        f"среднее {err_mean:.2e}, ковариация {err_cov:.2e}"


def _check_gradient() -> Tuple[bool, str]:
    fm, obs, ref = _small_instance()
    theta = np.array([0.5, -0.2, 0.1, 0.0, 0.3])
    grad = eval_grad(fm, theta, obs, ref)
    fd = fd_gradient(lambda t: eval_loss(fm, t, obs, ref), theta)
    rel = np.abs(fd - grad).max() / max(1.0, np.abs(grad).max())
    return rel <= 1e-6, f"отн. расхождение {rel:.2e}"


def _check_hessian() -> Tuple[bool, str]:
    fm, obs, ref = _small_instance()
    theta = np.array([0.5, -0.2, 0.1, 0.0, 0.3])
    hess = eval_hess(fm, theta, ref)
    fd = fd_hessian(lambda t: eval_grad(fm, t, obs, ref), theta)
    hvp = hess_vector_product(fm, theta, ref, np.arange(1.0, 6.0))
    err = np.abs(fd - hess).max()
    err_hvp = np.abs(hvp - hess @ np.arange(1.0, 6.0)).max()
    return err <= 1e-5 and err_hvp <= 1e-10, f"гессиан {err:.2e}, HVP {err_hvp:.2e}"


def _check_normalizer() -> Tuple[bool, str]:
    space = StateSpace.discrete(3, 2)
    fm = ising_feature_map(3)
    theta = np.array([0.3, -0.4, 0.2])
    ref = sample_reference_uniform(space, 100_000, RngSeed(5))
    diff = abs(log_normalizer_estimate(fm, theta, ref) - brute_force_log_C(fm, theta, space))
    return diff <= 0.01, f"|log C_mc - log C| = {diff:.4f}"


def _check_solver() -> Tuple[bool, str]:
    fm, obs, ref = _small_instance(p=3)
    fit = solve(fm, obs, ref, PenaltyConfig(0.0, 0.0, tol=1e-10, max_iter=20000))
    newton = dense_newton_solve(
        lambda t: eval_grad(fm, t, obs, ref), lambda t: eval_hess(fm, t, ref), np.zeros(3), tol=1e-10
    )
    err = np.abs(fit.theta_hat - newton).max()
    return err <= 1e-6 and fit.converged, f"|theta_pg - theta_newton| = {err:.2e}, KKT {fit.kkt_residual:.1e}"


def _check_soft_threshold() -> Tuple[bool, str]:
    out = soft_threshold(np.array([1.5, -0.3, 0.0]), 0.5)
    ok = np.allclose(out, [1.0, 0.0, 0.0], atol=0, rtol=0)
    return ok, f"результат {out.tolist()}"


def _check_w_hat() -> Tuple[bool, str]:
    fm, obs, ref = _small_instance(p=3)
    theta = np.array([0.6, 0.1, -0.2])
    w = fit_w_hat(fm, obs, ref, theta, 0, 0.0, PenaltyConfig(0.0, tol=1e-12, max_iter=50000))
    oracle = dense_w_hat(eval_hess(fm, theta, ref), 0)
    err = np.abs(w - oracle).max()
    return err <= 1e-6, f"|w_hat - w_dense| = {err:.2e}"


def _check_mirror() -> Tuple[bool, str]:
    rng = RngSeed(13).generator()
    mismatches = 0
    for _ in range(MIRROR_SWEEP_SIZE):
        p = int(rng.integers(1, 30))
        t1, t2 = rng.normal(0.5, 1.5, p), rng.normal(0.5, 1.5, p)
        q = float(rng.uniform(0.01, 0.99))
        tau = mirror_select(t1, t2, MirrorConfig(q=q)).diagnostics["tau_q"]
        if tau != exhaustive_mirror_cutoff(mirror_statistics(t1, t2), q):
            mismatches += 1
    return mismatches == 0, f"расхождений {mismatches} из {MIRROR_SWEEP_SIZE}"


def _check_ebh() -> Tuple[bool, str]:
    evs = ebh_from_evalues([10.0, 9.0, 1.0, 0.1], 0.5)
    ok = evs.k_star == 2 and sorted(evs.order[:2].tolist()) == [0, 1]
    ok = ok and exhaustive_ebh_kstar([10.0, 9.0, 1.0, 0.1], 0.5) == 2
    return ok, f"k* = {evs.k_star}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("brute_force_log_C vs прямая сумма", _check_log_c),
    ("brute_force_moments vs первые и вторые разности log C", _check_moments),
    ("eval_grad vs разности eval_loss", _check_gradient),
    ("eval_hess / HVP vs разности eval_grad", _check_hessian),
    ("MCMC log C vs полный перебор", _check_normalizer),
    ("solve(lambda=0) vs плотный Ньютон", _check_solver),
    ("soft_threshold", _check_soft_threshold),
    ("fit_w_hat(lambda'=0) vs прямое решение", _check_w_hat),
    ("mirror_select vs перебор порогов", _check_mirror),
    ("e-BH k* на эталоне", _check_ebh),
]


def run_verify_suite() -> List[CheckResult]:
    """
    Запускает все проверки; исключение внутри проверки считается провалом

    Returns:
        Список CheckResult
    """
    results = []
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - start
        tag = "[OK]" if passed else "[ERROR]"
        logger.info(f"{tag} {name}: {detail} ({elapsed:.2f} c)")
        results.append(CheckResult(name, bool(passed), detail, elapsed))
    return results


if __name__ == "__main__":
    outcome = run_verify_suite()
    print(f"Пройдено {sum(r.passed for r in outcome)} из {len(outcome)}")
