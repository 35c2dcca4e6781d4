import numpy as np
import pytest
from scipy.stats import norm

from fdr import compute_evalues, ebh_select, normalized_statistics
from inference import (
    CoordinateSplit,
    decorrelated_score,
    fit_w_hat,
    infer_all,
    infer_coordinate,
    inference_frame,
    one_step_estimate,
    score_test,
    solve_w_program,
    variance_estimate,
)
from likelihood import curvature_at, eval_grad, eval_hess
from mrf import FeatureMap
from oracles import dense_newton_solve, dense_w_hat, schur_complement
from samplers import ObservedSample, ReferenceChain
from solver import PenaltyConfig, solve

W_CFG = PenaltyConfig(0.0, tol=1e-12, max_iter=50000)


@pytest.fixture(scope="module")
def unpenalized(small_cos_instance):
    fm, obs, ref = small_cos_instance
    return dense_newton_solve(
        lambda t: eval_grad(fm, t, obs, ref), lambda t: eval_hess(fm, t, ref), np.zeros(fm.p), tol=1e-10
    )


def test_coordinate_split_reassembles_exactly():
    theta = np.array([0.3, -1.2, 0.0, 4.5])
    split = CoordinateSplit.from_theta(theta, 2)
    assert split.alpha_hat == 0.0
    assert np.array_equal(split.beta_hat, [0.3, -1.2, 4.5])
    assert np.array_equal(split.reassemble(), theta)
    assert np.array_equal(split.reassemble(7.0), [0.3, -1.2, 7.0, 4.5])
    with pytest.raises(ValueError):
        CoordinateSplit.from_theta(theta, 4)


def test_huge_lambda_prime_gives_zero_w(cos_instance):
    fm, obs, ref = cos_instance
    theta = np.array([0.5, 0.0, 0.0, 0.3, 0.0])
    column = eval_hess(fm, theta, ref)[:, 0]
    w = fit_w_hat(fm, obs, ref, theta, 0, 1.01 * np.abs(column[1:]).max(), W_CFG)
    assert np.array_equal(w, np.zeros(fm.p - 1))


def test_w_hat_matches_dense_solve(small_cos_instance):
    fm, obs, ref = small_cos_instance
    theta = np.array([0.6, 0.1, -0.2])
    w = fit_w_hat(fm, obs, ref, theta, 0, 0.0, W_CFG)
    assert np.abs(w - dense_w_hat(eval_hess(fm, theta, ref), 0)).max() <= 1e-6


@pytest.mark.parametrize("lambda_prime", [0.0, 0.01, 0.1])
def test_w_program_objective_and_kkt(cos_instance, lambda_prime):
    fm, _, ref = cos_instance
    theta = np.array([0.5, 0.0, 0.1, 0.3, 0.0])
    curvature = curvature_at(fm, theta, ref)
    cfg = PenaltyConfig(0.0, tol=1e-10, max_iter=50000)
    result = solve_w_program(curvature, 1, lambda_prime, cfg)
    hess = eval_hess(fm, theta, ref)
    rest = [0, 2, 3, 4]
    w = result.x
    objective = 0.5 * w @ hess[np.ix_(rest, rest)] @ w - w @ hess[rest, 1] + lambda_prime * np.abs(w).sum()
    assert objective <= 1e-12
    assert result.kkt_residual <= 1e-6


def test_w_program_needs_two_coordinates(cos_instance):
    from mrf import builtin_feature_map

    fm = builtin_feature_map("cos", 1)
    _, _, ref = cos_instance
    with pytest.raises(ValueError):
        solve_w_program(curvature_at(fm, np.zeros(1), ref), 0, 0.1, W_CFG)


def test_score_without_projection_is_partial_gradient(cos_instance):
    fm, obs, ref = cos_instance
    theta = np.array([0.5, 0.1, 0.0, 0.3, 0.0])
    split = CoordinateSplit.from_theta(theta, 3)
    u = decorrelated_score(fm, obs, ref, 0.0, split.beta_hat, np.zeros(4), 3)
    assert u == eval_grad(fm, split.reassemble(0.0), obs, ref)[3]
    with pytest.raises(ValueError):
        decorrelated_score(fm, obs, ref, 0.0, split.beta_hat, np.zeros(3), 3)


def test_score_vanishes_at_unpenalized_minimizer(small_cos_instance, unpenalized):
    fm, obs, ref = small_cos_instance
    split = CoordinateSplit.from_theta(unpenalized, 1)
    w = fit_w_hat(fm, obs, ref, unpenalized, 1, 0.0, W_CFG)
    assert abs(decorrelated_score(fm, obs, ref, split.alpha_hat, split.beta_hat, w, 1)) <= 1e-8


def test_variance_estimate_dense_identities(small_cos_instance):
    fm, _, ref = small_cos_instance
    theta = np.array([0.4, -0.1, 0.2])
    hess = eval_hess(fm, theta, ref)
    assert variance_estimate(fm, ref, theta, np.zeros(2), 0) == pytest.approx(hess[0, 0], abs=1e-14)
    w = np.array([0.3, -0.7])
    expected = hess[2, 2] - w @ hess[[0, 1], 2]
    assert variance_estimate(fm, ref, theta, w, 2) == pytest.approx(expected, abs=1e-14)
    assert variance_estimate(fm, ref, theta, dense_w_hat(hess, 1), 1) == pytest.approx(
        schur_complement(hess, 1), abs=1e-8
    )


def test_score_statistic_identity(cos_instance):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(0.01, lambda_prime=0.01)
    fit = solve(fm, obs, ref, cfg)
    result = score_test(fm, obs, ref, fit.theta_hat, 0.0, 1, cfg.lambda_prime, cfg)
    assert result.h_hat > 0
    assert result.s_stat == pytest.approx(np.sqrt(obs.n / result.h_hat) * result.u_hat, rel=1e-12)
    assert result.p_value == pytest.approx(2 * norm.sf(abs(result.s_stat)), rel=1e-12)


def test_confidence_interval_formula(cos_instance):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(0.01, lambda_prime=0.01)
    fit = solve(fm, obs, ref, cfg)
    result = one_step_estimate(fm, obs, ref, fit.theta_hat, 0, cfg.lambda_prime, cfg, eta=0.1)
    half = norm.ppf(0.95) / np.sqrt(obs.n * result.h_hat)
    assert result.ci_defined
    assert result.ci_lo <= result.alpha_tilde <= result.ci_hi
    assert (result.ci_hi - result.ci_lo) / 2 == pytest.approx(half, abs=1e-12)
    assert (result.ci_hi + result.ci_lo) / 2 == pytest.approx(result.alpha_tilde, abs=1e-12)
    assert result.alpha_tilde == pytest.approx(result.alpha_hat - result.u_at_estimate / result.h_hat, abs=1e-14)


def test_half_width_plug_in():
    assert norm.ppf(0.975) / np.sqrt(10000 * 1.0) == pytest.approx(0.0196, abs=1e-4)


def test_one_step_keeps_stationary_estimate(small_cos_instance, unpenalized):
    fm, obs, ref = small_cos_instance
    result = one_step_estimate(fm, obs, ref, unpenalized, 0, 0.0, W_CFG)
    assert result.alpha_tilde == pytest.approx(unpenalized[0], abs=1e-8)


def test_nonpositive_variance_flags_undefined(cos_instance):
    fm, obs, _ = cos_instance
    flat = ReferenceChain(np.full((20, 1), 0.25), np.zeros(20), "iid_gaussian", fm.space)
    result = infer_coordinate(fm, obs, flat, np.zeros(fm.p), 0, 0.1, W_CFG)
    # H_a|b здесь - остаток округления порядка 1e-32, а не дисперсия
    assert abs(result.h_hat) <= 1e-20
    assert result.s_stat == 0.0
    assert result.p_value == 1.0
    assert not result.ci_defined
    assert np.isnan(result.alpha_tilde) and np.isnan(result.ci_lo) and np.isnan(result.ci_hi)


def test_degenerate_reference_yields_no_statistics(cos_instance):
    fm, obs, _ = cos_instance
    flat = ReferenceChain(np.full((20, 1), 0.25), np.zeros(20), "iid_gaussian", fm.space)
    results = infer_all(fm, obs, flat, np.zeros(fm.p), 0.1, W_CFG, mc_correction=True)
    assert not any(r.ci_defined for r in results)
    assert all(r.s_stat == 0.0 and r.p_value == 1.0 for r in results)
    assert np.array_equal(compute_evalues(results), np.zeros(fm.p))
    assert np.all(np.isnan(normalized_statistics(results, np.zeros(fm.p), obs.n)))
    assert ebh_select(results, np.zeros(fm.p), 0.1).selected.size == 0


def test_small_but_genuine_variance_stays_defined(cos_instance):
    fm, obs, ref = cos_instance
    scale = 1e-3
    tiny = FeatureMap("cos*1e-3", fm.p, lambda x: scale * fm.fn(x), scale, space=fm.space)
    result = infer_coordinate(tiny, ObservedSample.from_draws(tiny, obs.draws), ref, np.zeros(fm.p), 0, 0.1, W_CFG)
    assert result.ci_defined
    assert result.h_hat > 0


def test_reference_correction_widens_interval(cos_instance):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(0.01, lambda_prime=0.01)
    theta = solve(fm, obs, ref, cfg).theta_hat
    plain = one_step_estimate(fm, obs, ref, theta, 0, cfg.lambda_prime, cfg)
    corrected = one_step_estimate(fm, obs, ref, theta, 0, cfg.lambda_prime, cfg, mc_correction=True)
    assert plain.n_eff == obs.n and plain.mc_variance == 0.0
    assert corrected.mc_variance > 0
    expected_n = obs.n * corrected.h_hat / (corrected.h_hat + obs.n * corrected.mc_variance)
    assert corrected.n_eff == pytest.approx(expected_n, rel=1e-12)
    assert corrected.n_eff < obs.n
    assert corrected.alpha_tilde == plain.alpha_tilde
    half = norm.ppf(0.975) / np.sqrt(corrected.n_eff * corrected.h_hat)
    assert (corrected.ci_hi - corrected.ci_lo) / 2 == pytest.approx(half, abs=1e-12)
    assert corrected.s_stat == pytest.approx(np.sqrt(corrected.n_eff / corrected.h_hat) * corrected.u_hat, rel=1e-12)
    assert abs(corrected.s_stat) < abs(plain.s_stat) or plain.s_stat == 0.0


def test_eta_validation(cos_instance):
    fm, obs, ref = cos_instance
    with pytest.raises(ValueError):
        infer_coordinate(fm, obs, ref, np.zeros(fm.p), 0, 0.1, W_CFG, eta=1.0)


def test_infer_all_is_ordered_and_thread_independent(cos_instance):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(0.01, lambda_prime=0.02)
    theta = solve(fm, obs, ref, cfg).theta_hat
    serial = infer_all(fm, obs, ref, theta, cfg.lambda_prime, cfg, targets=[3, 0, 2])
    parallel = infer_all(fm, obs, ref, theta, cfg.lambda_prime, cfg, targets=[3, 0, 2], max_workers=3)
    assert [r.target_index for r in serial] == [3, 0, 2]
    for a, b in zip(serial, parallel):
        assert a.s_stat == b.s_stat and a.alpha_tilde == b.alpha_tilde
    frame = inference_frame(serial)
    assert frame["index"].tolist() == [3, 0, 2]
    assert (frame["n"] == obs.n).all()
