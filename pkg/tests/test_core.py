import numpy as np
import pytest

from sublsq import (
    Dataset,
    ValidationError,
    leverage_scores,
    ols_fit,
    weighted_ls_fit,
)

from conftest import gaussian_dataset


def test_ols_identity_design():
    d = Dataset(design=np.eye(2), response=np.array([3.0, 4.0]))
    fit = ols_fit(d)
    np.testing.assert_allclose(fit.beta, [3.0, 4.0], atol=1e-12)
    assert fit.rank == 2


def test_ols_exact_line(line_dataset):
    # y = 1 + x holds exactly at every point, so the residual must vanish
    fit = ols_fit(line_dataset)
    np.testing.assert_allclose(fit.beta, [1.0, 1.0], atol=1e-10)
    assert fit.residual_ss < 1e-20


def test_ols_rank_deficient_minimum_norm():
    # Rank-1 system: solutions are b1 + b2 = 2; the shortest one is (1, 1)
    d = Dataset(design=np.array([[1.0, 1.0], [1.0, 1.0]]), response=np.array([2.0, 2.0]))
    fit = ols_fit(d)
    np.testing.assert_allclose(fit.beta, [1.0, 1.0], atol=1e-12)
    assert fit.rank == 1


def test_ols_rejects_nonfinite():
    with pytest.raises(ValidationError):
        Dataset(design=np.array([[1.0], [np.nan]]), response=np.array([0.0, 1.0]))
    with pytest.raises(ValidationError):
        Dataset(design=np.array([[1.0], [2.0]]), response=np.array([0.0, np.inf]))


def test_ols_minimizes_objective():
    rng = np.random.default_rng(31)
    d = gaussian_dataset(7, 60, 4)
    beta = ols_fit(d).beta
    base = np.sum((d.response - d.design @ beta) ** 2)
    for _ in range(50):
        delta = rng.standard_normal(4)
        delta *= 1e-3 / np.linalg.norm(delta)
        perturbed = np.sum((d.response - d.design @ (beta + delta)) ** 2)
        assert perturbed >= base


def test_weighted_uniform_equals_ols():
    for seed in range(20):
        d = gaussian_dataset(seed, 40, 3)
        b_ols = ols_fit(d).beta
        b_w = weighted_ls_fit(d, np.ones(d.n)).beta
        np.testing.assert_allclose(b_w, b_ols, rtol=1e-10)


def test_weighted_constant_weights_invariance():
    d = gaussian_dataset(5, 30, 3)
    b1 = weighted_ls_fit(d, np.ones(d.n)).beta
    b2 = weighted_ls_fit(d, np.full(d.n, 7.5)).beta
    np.testing.assert_allclose(b1, b2, rtol=1e-10)


def test_weighted_two_point_example():
    # minimize 2 b^2 + (3 - b)^2  =>  6b = 6  =>  b = 1
    d = Dataset(design=np.array([[1.0], [1.0]]), response=np.array([0.0, 3.0]))
    fit = weighted_ls_fit(d, np.array([2.0, 1.0]))
    np.testing.assert_allclose(fit.beta, [1.0], atol=1e-12)


@pytest.mark.parametrize("bad", [[0.0, 1.0], [-1.0, 1.0], [np.nan, 1.0], [np.inf, 1.0]])
def test_weighted_rejects_bad_weights(bad):
    d = Dataset(design=np.array([[1.0], [2.0]]), response=np.array([1.0, 2.0]))
    with pytest.raises(ValidationError):
        weighted_ls_fit(d, np.array(bad))


def test_leverage_line_example(line_dataset):
    # oracle: the diagonal of X (X'X)^{-1} X' formed explicitly
    X = line_dataset.design
    H = X @ np.linalg.inv(X.T @ X) @ X.T
    scores = leverage_scores(line_dataset).scores
    np.testing.assert_allclose(scores, np.diag(H), atol=1e-12)
    np.testing.assert_allclose(scores, [5 / 6, 1 / 3, 5 / 6], atol=1e-12)


def test_leverage_univariate_formula():
    # simple-regression oracle: h_i = 1/n + (x_i - xbar)^2 / sum (x_j - xbar)^2
    rng = np.random.default_rng(11)
    x = rng.standard_normal(25)
    d = Dataset(design=np.column_stack([np.ones(25), x]), response=np.zeros(25))
    expect = 1 / 25 + (x - x.mean()) ** 2 / np.sum((x - x.mean()) ** 2)
    np.testing.assert_allclose(leverage_scores(d).scores, expect, atol=1e-12)


def test_leverage_sum_and_range():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 120))
        p = int(rng.integers(1, min(n, 8)))
        d = gaussian_dataset(seed + 1000, n, p)
        scores = leverage_scores(d).scores
        assert abs(scores.sum() - p) <= 1e-8
        assert np.all(scores > 0) and np.all(scores < 1)


def test_leverage_orthonormal_rows_equal():
    # orthonormal columns with equal-norm rows: every score is p/n
    n, p = 8, 2
    blocks = np.vstack([np.eye(p)] * (n // p)) / np.sqrt(n // p)
    d = Dataset(design=blocks, response=np.zeros(n))
    np.testing.assert_allclose(leverage_scores(d).scores, np.full(n, p / n), atol=1e-12)


def test_residual_variance_identity_monte_carlo():
    # residuals e = (I - H) eps, so var(e_i) = (1 - h_ii) sigma^2;
    # checked against an explicitly formed hat matrix over 40000 draws
    rng = np.random.default_rng(2)
    n, p, sigma = 25, 3, 1.3
    X = rng.standard_normal((n, p))
    d = Dataset(design=X, response=np.zeros(n))
    h = leverage_scores(d).scores
    H = X @ np.linalg.inv(X.T @ X) @ X.T
    eps = sigma * rng.standard_normal((40_000, n))
    resid = eps - eps @ H.T
    emp = resid.var(axis=0, ddof=1)
    np.testing.assert_allclose(emp, (1 - h) * sigma**2, rtol=0.05)


def test_dataset_shape_validation():
    with pytest.raises(ValidationError):
        Dataset(design=np.ones((3, 2)), response=np.ones(4))
    with pytest.raises(ValidationError):
        Dataset(design=np.ones((0, 2)), response=np.ones(0))


def test_results_are_frozen(line_dataset):
    fit = ols_fit(line_dataset)
    with pytest.raises(ValueError):
        fit.beta[0] = 99.0
    with pytest.raises(ValueError):
        line_dataset.design[0, 0] = 99.0
