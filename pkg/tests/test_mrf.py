import itertools
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mrf import (
    FeatureMap,
    StateSpace,
    brute_force_log_C,
    brute_force_moments,
    brute_force_probabilities,
    builtin_feature_map,
    check_theta,
    default_space,
    enumerate_states,
    get_feature_map,
    ising_feature_map,
    log_density_unnormalized,
    register_feature_map,
    state_index,
)
from oracles import fd_gradient, fd_hessian, fd_scalar_hessian

ROOT = Path(__file__).parent.parent


def test_builtin_feature_values():
    assert np.allclose(builtin_feature_map("cos", 3).eval([0.0]), [1.0, 1.0, 1.0])
    assert np.allclose(builtin_feature_map("rational", 2).eval([1.0]), [0.5, 0.5])
    assert np.allclose(builtin_feature_map("arctan", 4).eval([0.0]), [0.0, 0.0, 0.0, 0.0])


def test_cos_frequencies():
    fm = builtin_feature_map("cos", 4)
    x = 0.3
    expected = np.cos(np.arange(1, 5) * x * np.pi)
    assert np.allclose(fm.eval([x]), expected, atol=1e-15)


def test_arctan_last_coordinate_is_log():
    fm = builtin_feature_map("arctan", 3)
    x = 0.7
    assert np.allclose(fm.eval([x]), [np.arctan(x), np.arctan(2 * x), np.log(3 * x + 1)])


@pytest.mark.parametrize("feature_id", ["cos", "arctan", "rational"])
@pytest.mark.parametrize("p", [1, 7, 50])
def test_sup_bound_holds_on_box(feature_id, p):
    fm = builtin_feature_map(feature_id, p)
    lo, hi = fm.space.lo[0], fm.space.hi[0]
    grid = np.linspace(lo, hi, 2001)
    assert np.abs(fm.eval_batch(grid)).max() <= fm.sup_bound + 1e-12


def test_builtin_validation():
    with pytest.raises(ValueError):
        builtin_feature_map("sin", 3)
    with pytest.raises(ValueError):
        builtin_feature_map("cos", 0)
    with pytest.raises(ValueError):
        builtin_feature_map("arctan", 4, StateSpace.box(1, -0.5, 1.0))
    with pytest.raises(ValueError):
        builtin_feature_map("rational", 4, StateSpace.box(1, -1.0, 1.0))
    with pytest.raises(ValueError):
        builtin_feature_map("cos", 3, StateSpace.discrete(1, 3))


def test_eval_batch_rejects_bad_shapes():
    fm = ising_feature_map(3)
    with pytest.raises(ValueError):
        fm.eval_batch(np.zeros((4, 2)))
    bad = FeatureMap("bad", 2, lambda x: np.zeros((x.shape[0], 3)), 1.0)
    with pytest.raises(ValueError):
        bad.eval_batch(np.zeros((2, 1)))
    nan_map = FeatureMap("nan", 1, lambda x: np.full((x.shape[0], 1), np.nan), 1.0)
    with pytest.raises(ValueError):
        nan_map.eval_batch(np.zeros((2, 1)))


def test_check_theta():
    assert np.array_equal(check_theta([1, 2], 2), [1.0, 2.0])
    with pytest.raises(ValueError):
        check_theta([1.0, 2.0, 3.0], 2)
    with pytest.raises(ValueError):
        check_theta([1.0, np.inf], 2)


def test_log_density_unnormalized():
    fm = builtin_feature_map("rational", 2)
    assert log_density_unnormalized(fm, np.zeros(2), [0.4]) == 0.0
    assert log_density_unnormalized(fm, np.ones(2), [1.0]) == pytest.approx(1.0)
    unit = FeatureMap("lin", 2, lambda x: np.hstack([2 * np.ones_like(x), x]), 2.0)
    assert log_density_unnormalized(unit, [1.0, 0.0], [0.3]) == pytest.approx(2.0)


def test_state_space_validation():
    with pytest.raises(ValueError):
        StateSpace.discrete(2, 1)
    with pytest.raises(ValueError):
        StateSpace.box(1, 1.0, 1.0)
    with pytest.raises(ValueError):
        StateSpace.discrete(0, 2)
    box = StateSpace.box(2, 0.0, 1.0)
    assert box.contains(np.array([[0.5, 0.5], [1.5, 0.2]])).tolist() == [True, False]
    with pytest.raises(ValueError):
        _ = box.size


def test_box_base_measure():
    assert StateSpace.box(1, -1.0, 1.0).log_base(np.array([[0.5], [1.0]])).tolist() == [0.0, 0.0]
    gaussian = StateSpace.box(2, -1.0, 1.0, base="gaussian")
    assert np.allclose(gaussian.log_base(np.array([[0.5, 1.0], [0.0, 0.0]])), [-0.625, 0.0])
    assert default_space("cos").base == "gaussian"
    assert StateSpace.discrete(2, 2).log_base(np.zeros((3, 2))).tolist() == [0.0] * 3
    with pytest.raises(ValueError):
        StateSpace.box(1, 0.0, 1.0, base="cauchy")
    with pytest.raises(ValueError):
        StateSpace(kind="discrete", d=2, r=2, base="gaussian")


def test_enumeration_order_and_index():
    space = StateSpace.discrete(3, 3)
    states = enumerate_states(space)
    assert states.shape == (27, 3)
    assert states[0].tolist() == [0, 0, 0]
    assert states[1].tolist() == [0, 0, 1]
    assert np.array_equal(state_index(states, 3), np.arange(27))
    with pytest.raises(ValueError):
        enumerate_states(StateSpace.discrete(21, 2))


def _pair_map_r3():
    # phi(x) = x_0 x_1 на {0, 1, 2}^2
    return FeatureMap("pair", 1, lambda x: (x[:, 0] * x[:, 1])[:, None], 4.0, d=2, space=StateSpace.discrete(2, 3))


def test_log_c_at_zero_counts_states():
    assert brute_force_log_C(ising_feature_map(3), np.zeros(3), StateSpace.discrete(3, 2)) == pytest.approx(np.log(8))
    assert brute_force_log_C(_pair_map_r3(), np.zeros(1), StateSpace.discrete(2, 3)) == pytest.approx(np.log(9))


def test_log_c_matches_direct_summation_over_spins():
    fm = ising_feature_map(3)
    theta = np.array([0.7, -1.1, 0.4])
    total = 0.0
    for spins in itertools.product((-1, 1), repeat=3):
        s = np.array(spins, dtype=float)
        total += np.exp(theta @ np.array([s[0] * s[1], s[0] * s[2], s[1] * s[2]]))
    assert brute_force_log_C(fm, theta, StateSpace.discrete(3, 2)) == pytest.approx(np.log(total), rel=1e-12)


def test_probabilities_sum_to_one(ising3):
    fm, space, _ = ising3
    probs = brute_force_probabilities(fm, np.linspace(-1, 1, fm.p), space)
    assert probs.shape == (8,)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_moments_at_zero_are_uniform_average(ising3):
    fm, space, _ = ising3
    mean, _ = brute_force_moments(fm, np.zeros(fm.p), space)
    assert np.allclose(mean, fm.eval_batch(enumerate_states(space)).mean(axis=0))


def test_moments_match_naive_enumeration():
    fm = ising_feature_map(2, with_fields=True)
    space = StateSpace.discrete(2, 2)
    theta = np.array([0.3, -0.6, 0.9])
    weights, feats = [], []
    for x in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        s = 2 * np.array(x, dtype=float) - 1
        phi = np.array([s[0] * s[1], s[0], s[1]])
        feats.append(phi)
        weights.append(np.exp(theta @ phi))
    weights = np.array(weights) / np.sum(weights)
    feats = np.array(feats)
    naive_mean = weights @ feats
    naive_cov = sum(w * np.outer(f - naive_mean, f - naive_mean) for w, f in zip(weights, feats))
    mean, cov = brute_force_moments(fm, theta, space)
    assert np.allclose(mean, naive_mean, atol=1e-12)
    assert np.allclose(cov, naive_cov, atol=1e-12)


def test_moments_are_derivatives_of_log_c(ising3):
    fm, space, _ = ising3
    theta = np.array([0.2, -0.4, 0.1, 0.3, -0.2, 0.05])
    mean, cov = brute_force_moments(fm, theta, space)
    fd_mean = fd_gradient(lambda t: brute_force_log_C(fm, t, space), theta)
    fd_cov = fd_hessian(lambda t: brute_force_moments(fm, t, space)[0], theta)
    assert np.abs(fd_mean - mean).max() <= 1e-6 * max(1.0, np.abs(mean).max())
    assert np.abs(fd_cov - cov).max() <= 1e-5
    assert np.allclose(cov, cov.T)
    assert np.linalg.eigvalsh(cov).min() >= -1e-10


def test_registry_lookup_and_custom_map():
    assert get_feature_map("cos", 4).p == 4
    assert get_feature_map("ising", 3, StateSpace.discrete(3, 2)).p == 3
    with pytest.raises(ValueError):
        get_feature_map("unknown-map", 3)

    register_feature_map("square", lambda p, space: FeatureMap(
        "square", p, lambda x: np.repeat(x[:, :1] ** 2, p, axis=1), 1.0, space=space or default_space("cos"),
    ))
    fm = get_feature_map("square", 2)
    assert np.allclose(fm.eval([0.5]), [0.25, 0.25])


def test_moments_match_second_differences_of_log_c():
    space = StateSpace.discrete(3, 2)
    fm = ising_feature_map(3, with_fields=True)
    theta = np.linspace(-0.5, 0.5, fm.p)
    _, cov = brute_force_moments(fm, theta, space)
    fd_cov = fd_scalar_hessian(lambda t: brute_force_log_C(fm, t, space), theta)
    assert np.abs(fd_cov - cov).max() <= 1e-5


@pytest.mark.parametrize("script", ["mrf/exact.py", "samplers/metropolis.py"])
def test_module_demo_runs_as_script(script, tmp_path):
    completed = subprocess.run(
        [sys.executable, str(ROOT / script)], cwd=tmp_path, capture_output=True, text=True, timeout=120
    )
    assert completed.returncode == 0, completed.stderr
