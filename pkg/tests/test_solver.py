import numpy as np
import pytest

from likelihood import eval_grad, eval_hess
from mrf import FeatureMap
from oracles import dense_newton_solve
from samplers import ObservedSample, RngSeed
from solver import (
    PenaltyConfig,
    accelerated_proximal_gradient,
    cross_validate,
    cv_table_frame,
    default_penalty_grid,
    fit_result_frame,
    fit_with_cv,
    fold_indices,
    kkt_residual,
    soft_threshold,
    solve,
    solve_path,
)


def test_soft_threshold_examples():
    assert np.array_equal(soft_threshold(np.array([1.5, -0.3, 0.0]), 0.5), [1.0, 0.0, 0.0])
    z = np.array([0.2, -3.0, 4.5])
    assert np.array_equal(soft_threshold(z, 0.0), z)
    with pytest.raises(ValueError):
        soft_threshold(z, -0.1)


def test_soft_threshold_minimizes_scalar_problem():
    rng = RngSeed(31).generator()
    grid = np.linspace(-5.0, 5.0, 100_001)
    for _ in range(20):
        z = float(rng.uniform(-4, 4))
        kappa = float(rng.uniform(0, 2))
        best = grid[np.argmin(0.5 * (grid - z) ** 2 + kappa * np.abs(grid))]
        assert abs(soft_threshold(np.array([z]), kappa)[0] - best) <= 1e-4


def test_accelerated_gradient_on_separable_quadratic():
    z = np.array([2.0, -0.4, 0.9, -3.0])

    def smooth(x):
        return 0.5 * float((x - z) @ (x - z)), x - z

    result = accelerated_proximal_gradient(smooth, np.zeros(4), 0.5, max_iter=500, tol=1e-12)
    assert result.converged
    assert np.allclose(result.x, soft_threshold(z, 0.5), atol=1e-8)
    assert result.kkt_residual <= 10 * 1e-12


def test_kkt_residual_formula():
    grad = np.array([0.5, -2.0, 0.1])
    theta = np.array([0.0, 1.0, 0.0])
    assert kkt_residual(grad, theta, 1.0, 0.0) == pytest.approx(1.0)
    # ridge term enters as 2 lambda2 theta
    assert kkt_residual(grad, theta, 1.0, 0.5) == pytest.approx(0.0)


def test_penalty_config_validation():
    with pytest.raises(ValueError):
        PenaltyConfig(-1.0)
    with pytest.raises(ValueError):
        PenaltyConfig(0.1, tol=0.0)
    with pytest.raises(ValueError):
        PenaltyConfig(0.1, max_iter=0)
    cfg = PenaltyConfig(0.1, 0.01, 0.2)
    assert cfg.fit_key == PenaltyConfig(0.1, 0.01, 0.5).fit_key
    assert cfg.with_lambdas(lambda1=0.3).lambda1 == 0.3


def test_huge_lambda_gives_zero(cos_instance):
    fm, obs, ref = cos_instance
    g0 = eval_grad(fm, np.zeros(fm.p), obs, ref)
    fit = solve(fm, obs, ref, PenaltyConfig(1.01 * np.abs(g0).max()))
    assert np.array_equal(fit.theta_hat, np.zeros(fm.p))
    assert fit.support_size == 0
    assert fit.converged


def test_unpenalized_solution_matches_newton(small_cos_instance):
    fm, obs, ref = small_cos_instance
    fit = solve(fm, obs, ref, PenaltyConfig(0.0, 0.0, tol=1e-10, max_iter=20000))
    newton = dense_newton_solve(
        lambda t: eval_grad(fm, t, obs, ref), lambda t: eval_hess(fm, t, ref), np.zeros(fm.p), tol=1e-10
    )
    assert fit.converged
    assert fit.kkt_residual <= 10 * 1e-10
    assert np.abs(fit.theta_hat - newton).max() <= 1e-6


@pytest.mark.parametrize("lambda1, lambda2", [(0.01, 0.0), (0.05, 0.01), (0.002, 0.1)])
def test_kkt_certificate_at_convergence(cos_instance, lambda1, lambda2):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(lambda1, lambda2, tol=1e-9, max_iter=20000)
    fit = solve(fm, obs, ref, cfg)
    assert fit.converged
    assert fit.kkt_residual <= 10 * cfg.tol
    grad = eval_grad(fm, fit.theta_hat, obs, ref)
    assert kkt_residual(grad, fit.theta_hat, lambda1, lambda2) == pytest.approx(fit.kkt_residual, abs=1e-15)


def test_solution_is_permutation_equivariant(cos_instance):
    fm, obs, ref = cos_instance
    perm = np.array([3, 0, 4, 1, 2])
    permuted = FeatureMap("cos-perm", fm.p, lambda x: fm.fn(x)[:, perm], fm.sup_bound, space=fm.space)
    obs_perm = ObservedSample.from_draws(permuted, obs.draws)
    cfg = PenaltyConfig(0.01, 0.1, tol=1e-15, max_iter=3000)
    theta = solve(fm, obs, ref, cfg).theta_hat
    theta_perm = solve(permuted, obs_perm, ref, cfg).theta_hat
    assert np.abs(theta_perm - theta[perm]).max() <= 1e-8


def test_solve_path_warm_starts_and_duplicates(cos_instance):
    fm, obs, ref = cos_instance
    configs = [PenaltyConfig(0.01), PenaltyConfig(0.1), PenaltyConfig(0.01, lambda_prime=0.3), PenaltyConfig(0.03)]
    fits = solve_path(fm, obs, ref, configs)
    assert len(fits) == 4
    assert fits[0] is fits[2]
    assert fits[1].support_size <= fits[0].support_size


def test_default_penalty_grid():
    grid = default_penalty_grid(500, 500, 50, n_lambda=8, ridge_ratios=(0.1, 1.0))
    assert len(grid) == 16
    rate = 2 * np.sqrt(np.log(50) / 500) + np.log(50) / 500
    assert max(c.lambda1 for c in grid) == pytest.approx(rate)
    assert min(c.lambda1 for c in grid) == pytest.approx(0.01 * rate)
    for cfg in grid:
        assert cfg.lambda_prime == cfg.lambda1
        assert cfg.lambda2 == pytest.approx(0.1 * cfg.lambda1) or cfg.lambda2 == pytest.approx(cfg.lambda1)
    with pytest.raises(ValueError):
        default_penalty_grid(0, 10, 5)


def test_fold_indices_partition():
    parts = fold_indices(23, 5, RngSeed(1))
    assert len(parts) == 5
    assert np.array_equal(np.sort(np.concatenate(parts)), np.arange(23))
    assert {len(p) for p in parts} <= {4, 5}
    with pytest.raises(ValueError):
        fold_indices(3, 5, RngSeed(1))
    with pytest.raises(ValueError):
        fold_indices(10, 1, RngSeed(1))


def test_cross_validation_prefers_moderate_penalty(cos_instance):
    fm, obs, ref = cos_instance
    absurd = PenaltyConfig(1e6)
    moderate = PenaltyConfig(0.01)
    best, table = cross_validate(fm, obs, ref, [absurd, moderate], folds=3, seed=RngSeed(2))
    assert best == moderate
    assert len(table) == 2
    assert table[1].mean_loss < table[0].mean_loss


def test_cross_validation_duplicates_tie_deterministically(cos_instance):
    fm, obs, ref = cos_instance
    grid = [PenaltyConfig(0.02), PenaltyConfig(0.02)]
    best, table = cross_validate(fm, obs, ref, grid, folds=3, seed=RngSeed(3))
    assert table[0].fold_losses == table[1].fold_losses
    assert best == grid[0]
    again, _ = cross_validate(fm, obs, ref, grid, folds=3, seed=RngSeed(3), max_workers=3)
    assert again == best


def test_cross_validation_errors(cos_instance):
    fm, obs, ref = cos_instance
    with pytest.raises(ValueError):
        cross_validate(fm, obs, ref, [], folds=3)
    with pytest.raises(ValueError):
        cross_validate(fm, obs, ref, [PenaltyConfig(0.1)], folds=obs.n + 1)


def test_fit_with_cv_single_config(cos_instance):
    fm, obs, ref = cos_instance
    cfg = PenaltyConfig(0.05)
    fit, best, table = fit_with_cv(fm, obs, ref, [cfg])
    assert best == cfg
    assert table == []
    assert np.array_equal(fit.theta_hat, solve(fm, obs, ref, cfg).theta_hat)


def test_result_frames(cos_instance):
    fm, obs, ref = cos_instance
    grid = [PenaltyConfig(0.05), PenaltyConfig(0.01)]
    fit, best, table = fit_with_cv(fm, obs, ref, grid, folds=2)
    frame = fit_result_frame(fit, best)
    assert len(frame) == fm.p
    assert {"index", "theta_hat", "kkt_residual"} <= set(frame.columns)
    cv = cv_table_frame(table)
    assert list(cv.columns) == ["lambda1", "lambda2", "lambda_prime", "fold_0", "fold_1", "mean"]
    assert len(cv) == 2
