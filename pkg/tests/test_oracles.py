import numpy as np
import pytest

from oracles import (
    FiniteDiffSpec,
    dense_newton_solve,
    dense_w_hat,
    exhaustive_ebh_kstar,
    exhaustive_mirror_cutoff,
    fd_gradient,
    fd_hessian,
    fd_scalar_hessian,
    schur_complement,
)
from oracles.verify import CHECKS, MIRROR_SWEEP_SIZE, run_verify_suite

A = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
B = np.array([1.0, -2.0, 0.5])


def test_finite_differences_on_quadratic():
    theta = np.array([0.3, -0.1, 0.7])
    grad = fd_gradient(lambda t: 0.5 * t @ A @ t - B @ t, theta)
    hess = fd_hessian(lambda t: A @ t - B, theta)
    assert np.allclose(grad, A @ theta - B, atol=1e-8)
    assert np.allclose(hess, A, atol=1e-8)


def test_finite_diff_spec_validation():
    with pytest.raises(ValueError):
        FiniteDiffSpec(step=0.0)
    with pytest.raises(ValueError):
        FiniteDiffSpec(scheme="forward")


def test_dense_newton_on_quadratic():
    theta = dense_newton_solve(lambda t: A @ t - B, lambda t: A, np.zeros(3))
    assert np.allclose(theta, np.linalg.solve(A, B), atol=1e-10)


def test_dense_w_hat_and_schur():
    w = dense_w_hat(A, 0)
    assert np.allclose(A[1:, 1:] @ w, A[1:, 0])
    assert schur_complement(A, 0) == pytest.approx(1.0 / np.linalg.inv(A)[0, 0])


def test_exhaustive_sweeps():
    assert exhaustive_mirror_cutoff([5.0, 4.0, 3.0, -1.0], 0.5) == 1.0
    assert exhaustive_mirror_cutoff([0.0, np.nan], 0.5) == float("inf")
    assert exhaustive_ebh_kstar([10.0, 9.0, 1.0, 0.1], 0.5) == 2


def test_scalar_hessian_by_second_differences():
    theta = np.array([0.3, -0.1, 0.7])
    hess = fd_scalar_hessian(lambda t: 0.5 * t @ A @ t - B @ t + np.exp(t[0]), theta)
    expected = A + np.diag([np.exp(0.3), 0.0, 0.0])
    assert np.abs(hess - expected).max() <= 1e-6
    assert np.array_equal(hess, hess.T)


def test_verify_suite_passes():
    results = run_verify_suite()
    assert len(results) == len(CHECKS)
    failed = [r.name for r in results if not r.passed]
    assert not failed, failed
    assert MIRROR_SWEEP_SIZE == 1000
    mirror = next(r for r in results if r.name.startswith("mirror_select"))
    assert mirror.detail == "расхождений 0 из 1000"
