import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Логи тестов только в консоль
os.environ.setdefault("MRF_LOG_DIR", "")
os.environ.setdefault("MRF_LOG_LEVEL", "WARNING")

sys.path.insert(0, str(Path(__file__).parent.parent))

from mrf import StateSpace, builtin_feature_map, ising_feature_map
from samplers import RngSeed, metropolis_sample, sample_reference_gaussian, sample_reference_uniform


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="запускать долгие Monte Carlo тесты")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: долгие Monte Carlo прогоны (нужен --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="нужен --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def cos_instance():
    """cos-модель p=5: n=300 наблюдений, m=400 гауссовских опорных точек"""
    fm = builtin_feature_map("cos", 5)
    theta_star = np.array([0.8, 0.0, 0.0, 0.4, 0.0])
    obs = metropolis_sample(fm, theta_star, 300, burn_in=200, thin=2, seed=RngSeed(11, 1))
    ref = sample_reference_gaussian(400, 1, RngSeed(11, 2), fm.space)
    return fm, obs, ref


@pytest.fixture(scope="session")
def small_cos_instance():
    """cos-модель p=3 для сравнений с плотными оракулами"""
    fm = builtin_feature_map("cos", 3)
    obs = metropolis_sample(fm, np.array([0.6, 0.0, -0.3]), 400, burn_in=200, thin=2, seed=RngSeed(3, 1))
    ref = sample_reference_gaussian(600, 1, RngSeed(3, 2), fm.space)
    return fm, obs, ref


@pytest.fixture(scope="session")
def ising3():
    """Изинг на 3 вершинах с полями и точной равномерной опорной цепью"""
    space = StateSpace.discrete(3, 2)
    fm = ising_feature_map(3, with_fields=True)
    ref = sample_reference_uniform(space, 20_000, RngSeed(21))
    return fm, space, ref
