import numpy as np
import pandas as pd
import pytest

from scipy.stats import truncnorm

from mrf import StateSpace, brute_force_probabilities, builtin_feature_map, ising_feature_map, state_index
from samplers import (
    ObservedSample,
    ReferenceChain,
    RngSeed,
    load_draws_csv,
    metropolis_chain,
    metropolis_sample,
    sample_reference_gaussian,
    sample_reference_markov,
    sample_reference_uniform,
    samples_to_frame,
)


def test_rng_seed_determinism():
    a = RngSeed(42, 3).generator().standard_normal(5)
    b = RngSeed(42, 3).generator().standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RngSeed(42, 4).generator().standard_normal(5))


def test_rng_seed_children():
    root = RngSeed(7)
    assert root.child(1) == root.child(1)
    assert root.child(1) != root.child(2)
    assert root.child(1).child(2) != root.child(2).child(1)
    assert root.child(1).seed == 7


def test_rng_seed_validation():
    with pytest.raises(ValueError):
        RngSeed(-1)
    with pytest.raises(ValueError):
        RngSeed(0, 2 ** 64)


def test_gaussian_reference_log_density():
    ref = sample_reference_gaussian(50, 1, RngSeed(1))
    expected = -0.5 * np.log(2 * np.pi) - 0.5 * ref.draws[:, 0] ** 2
    assert np.allclose(ref.log_h, expected, atol=1e-12)
    assert ref.kind == "iid_gaussian"
    assert ref.m == 50


def test_gaussian_reference_is_reproducible():
    a = sample_reference_gaussian(100, 2, RngSeed(9, 1))
    b = sample_reference_gaussian(100, 2, RngSeed(9, 1))
    assert np.array_equal(a.draws, b.draws)
    assert np.array_equal(a.log_h, b.log_h)


def test_gaussian_reference_mean():
    ref = sample_reference_gaussian(1_000_000, 1, RngSeed(2024))
    assert abs(ref.draws.mean()) <= 4 / np.sqrt(1_000_000)


def test_box_reference_is_truncated_normal():
    fm = builtin_feature_map("cos", 3)
    ref = sample_reference_gaussian(5000, 1, RngSeed(3), fm.space)
    assert np.all(fm.space.contains(ref.draws))
    # Относительно гауссовской базовой меры плотность постоянна
    assert np.ptp(ref.log_h) <= 1e-9
    lebesgue = StateSpace.box(1, -1.0, 1.0)
    flat = sample_reference_gaussian(200, 1, RngSeed(3), lebesgue)
    assert np.allclose(flat.log_h, truncnorm.logpdf(flat.draws[:, 0], -1.0, 1.0), atol=1e-12)
    with pytest.raises(ValueError):
        sample_reference_gaussian(10, 2, RngSeed(3), lebesgue)


def test_reference_subset_keeps_density_and_space():
    fm = builtin_feature_map("cos", 2)
    ref = sample_reference_gaussian(10, 1, RngSeed(4), fm.space)
    part = ref.subset(np.arange(5, 10))
    assert part.m == 5
    assert np.array_equal(part.draws, ref.draws[5:])
    assert np.array_equal(part.log_h, ref.log_h[5:])
    assert part.space == ref.space and part.kind == ref.kind
    with pytest.raises(ValueError):
        ref.subset([])


def test_uniform_reference():
    space = StateSpace.discrete(4, 3)
    ref = sample_reference_uniform(space, 200, RngSeed(1))
    assert np.allclose(ref.log_h, -4 * np.log(3))
    assert np.all(space.contains(ref.draws))
    with pytest.raises(ValueError):
        sample_reference_uniform(StateSpace.box(1, 0.0, 1.0), 10, RngSeed(1))


def test_reference_chain_validation():
    with pytest.raises(ValueError):
        ReferenceChain(np.zeros((3, 1)), np.zeros(2), "iid_gaussian")
    with pytest.raises(ValueError):
        ReferenceChain(np.zeros((2, 1)), np.array([0.0, np.nan]), "iid_gaussian")


def test_reference_features_outside_box_are_masked():
    fm = builtin_feature_map("rational", 3)
    ref = ReferenceChain(np.array([[0.5], [-2.0], [1.5]]), np.zeros(3), "iid_gaussian", fm.space)
    features, support = ref.feature_matrix(fm)
    assert support.tolist() == [True, False, False]
    assert np.array_equal(features[1:], np.zeros((2, 3)))
    assert features is ref.feature_matrix(fm)[0]


def test_flat_target_accepts_every_proposal_inside_box():
    fm = builtin_feature_map("cos", 3, StateSpace.box(1, -1.0, 1.0))
    draws, acceptance = metropolis_chain(fm, np.zeros(3), 200, proposal_sd=1e-3, burn_in=0, thin=1, seed=RngSeed(4))
    assert acceptance == 1.0
    assert draws.shape == (200, 1)


def test_continuous_chain_stays_in_box():
    fm = builtin_feature_map("arctan", 4)
    draws, _ = metropolis_chain(fm, np.array([1.0, -0.5, 0.2, 0.3]), 500, proposal_sd=0.8,
                                burn_in=100, thin=2, seed=RngSeed(5))
    assert np.all(fm.space.contains(draws))


def test_gaussian_base_chain_matches_truncated_normal():
    fm = builtin_feature_map("cos", 3)
    draws, _ = metropolis_chain(fm, np.zeros(3), 20_000, proposal_sd=0.8, burn_in=500, thin=5, seed=RngSeed(19))
    assert np.all(fm.space.contains(draws))
    assert abs(np.mean(draws[:, 0] ** 2) - truncnorm.var(-1.0, 1.0)) <= 0.02


def test_metropolis_sample_is_reproducible():
    fm = builtin_feature_map("cos", 4)
    theta = np.array([0.5, 0.0, -0.2, 0.0])
    a = metropolis_sample(fm, theta, 100, burn_in=50, thin=2, seed=RngSeed(8))
    b = metropolis_sample(fm, theta, 100, burn_in=50, thin=2, seed=RngSeed(8))
    assert np.array_equal(a.draws, b.draws)
    assert np.array_equal(a.features, b.features)
    assert a.acceptance_rate == b.acceptance_rate
    assert np.allclose(a.mean_features, a.features.mean(axis=0))


def test_discrete_chain_matches_exact_frequencies():
    space = StateSpace.discrete(2, 2)
    fm = ising_feature_map(2, with_fields=True)
    theta = np.array([0.8, -0.3, 0.5])
    draws, _ = metropolis_chain(fm, theta, 100_000, burn_in=500, thin=3, seed=RngSeed(17))
    counts = np.bincount(state_index(draws.astype(int), 2), minlength=4) / draws.shape[0]
    assert np.abs(counts - brute_force_probabilities(fm, theta, space)).max() <= 0.01


def test_chain_argument_validation():
    fm = builtin_feature_map("cos", 2)
    with pytest.raises(ValueError):
        metropolis_chain(fm, np.zeros(2), 0)
    with pytest.raises(ValueError):
        metropolis_chain(fm, np.zeros(2), 10, proposal_sd=0.0)
    with pytest.raises(ValueError):
        metropolis_chain(fm, np.zeros(3), 10)


def test_markov_reference_is_unnormalized_energy():
    fm = builtin_feature_map("cos", 3)
    theta_ref = np.array([0.3, 0.0, 0.1])
    ref = sample_reference_markov(fm, theta_ref, 100, RngSeed(2), burn_in=50)
    assert ref.kind == "markov_kernel"
    assert np.allclose(ref.log_h, fm.eval_batch(ref.draws) @ theta_ref)


def test_observed_sample_subset():
    fm = builtin_feature_map("cos", 2)
    obs = ObservedSample.from_draws(fm, np.array([0.0, 0.5, 1.0]))
    part = obs.subset([0, 2])
    assert part.n == 2
    assert np.allclose(part.mean_features, obs.features[[0, 2]].mean(axis=0))
    with pytest.raises(ValueError):
        obs.subset([])


def test_draws_csv_roundtrip(tmp_path):
    draws = np.array([[0.1, 1.0], [0.2, 0.0]])
    path = tmp_path / "draws.csv"
    samples_to_frame(draws).to_csv(path, index=False)
    assert np.array_equal(load_draws_csv(str(path)), draws)
    pd.DataFrame({"y": [1, 2]}).to_csv(path, index=False)
    with pytest.raises(ValueError):
        load_draws_csv(str(path))
