import numpy as np
import pytest

from sublsq import (
    Dataset,
    DegenerateDistributionError,
    ProbabilityVector,
    RankError,
    ValidationError,
    compute_probabilities,
)

from conftest import gaussian_dataset

ALL_SCHEMES = ("RAND", "BLEV", "SLEV", "IC", "RL", "PL")


def _hand_oracle(X, scheme):
    """Direct textbook formulas, independent of the SVD route."""
    G_inv = np.linalg.inv(X.T @ X)
    if scheme == "BLEV":
        h = np.einsum("ij,jk,ik->i", X, G_inv, X)
        return h / h.sum()
    if scheme == "IC":
        raw = np.linalg.norm(X @ G_inv, axis=1)
        return raw / raw.sum()
    if scheme == "RL":
        raw = np.sqrt(np.einsum("ij,jk,ik->i", X, G_inv, X))
        return raw / raw.sum()
    raw = np.linalg.norm(X, axis=1)
    return raw / raw.sum()


def test_blev_line_example(line_dataset):
    pv = compute_probabilities(line_dataset, "BLEV")
    np.testing.assert_allclose(pv.probs, [5 / 12, 1 / 6, 5 / 12], atol=1e-12)


def test_ic_rl_pl_line_example(line_dataset):
    X = line_dataset.design
    for scheme, rounded in (
        ("IC", (0.5304, 0.1819, 0.2877)),
        ("RL", (0.3799, 0.2403, 0.3799)),
        ("PL", (0.2150, 0.3041, 0.4808)),
    ):
        pv = compute_probabilities(line_dataset, scheme)
        np.testing.assert_allclose(pv.probs, _hand_oracle(X, scheme), atol=1e-12)
        np.testing.assert_allclose(pv.probs, rounded, atol=5e-4)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_simplex_property(scheme):
    for seed in range(10):
        d = gaussian_dataset(seed, 50, 4)
        pv = compute_probabilities(d, scheme, 0.7 if scheme == "SLEV" else None)
        assert abs(pv.probs.sum() - 1.0) <= 1e-10
        assert np.all(pv.probs >= 0)


def test_slev_defaults_and_lower_bound():
    d = gaussian_dataset(3, 80, 3)
    pv = compute_probabilities(d, "SLEV")
    assert pv.alpha == 0.9
    # entrywise lower bound must hold exactly, not just within a tolerance
    assert np.all(pv.probs >= (1 - 0.9) / d.n)
    for alpha in (0.2, 0.5, 0.8, 0.99):
        pv = compute_probabilities(d, "SLEV", alpha)
        assert np.all(pv.probs >= (1 - alpha) / d.n)


def test_slev_endpoints_bit_exact():
    d = gaussian_dataset(4, 60, 3)
    blev = compute_probabilities(d, "BLEV").probs
    rand = compute_probabilities(d, "RAND").probs
    assert np.array_equal(compute_probabilities(d, "SLEV", 1.0).probs, blev)
    assert np.array_equal(compute_probabilities(d, "SLEV", 0.0).probs, rand)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_scale_invariance(scheme):
    d = gaussian_dataset(9, 40, 3)
    scaled = Dataset(design=17.3 * d.design, response=d.response)
    alpha = 0.85 if scheme == "SLEV" else None
    p1 = compute_probabilities(d, scheme, alpha).probs
    p2 = compute_probabilities(scaled, scheme, alpha).probs
    np.testing.assert_allclose(p1, p2, rtol=1e-9)


def test_orthonormal_coincidence():
    rng = np.random.default_rng(12)
    Q, _ = np.linalg.qr(rng.standard_normal((30, 4)))
    d = Dataset(design=Q, response=np.zeros(30))
    ic = compute_probabilities(d, "IC").probs
    rl = compute_probabilities(d, "RL").probs
    pl = compute_probabilities(d, "PL").probs
    np.testing.assert_allclose(ic, rl, atol=1e-12)
    np.testing.assert_allclose(rl, pl, atol=1e-12)


@pytest.mark.parametrize("scheme", ["BLEV", "SLEV", "IC", "RL"])
def test_rank_deficient_rejected(scheme):
    X = np.ones((5, 2))  # duplicated column, rank 1
    d = Dataset(design=X, response=np.zeros(5))
    with pytest.raises(RankError):
        compute_probabilities(d, scheme, 0.5 if scheme == "SLEV" else None)


@pytest.mark.parametrize("scheme", ["BLEV", "SLEV", "IC", "RL"])
def test_zero_row_rejected(scheme):
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])  # full rank, one zero row
    d = Dataset(design=X, response=np.zeros(3))
    with pytest.raises(DegenerateDistributionError):
        compute_probabilities(d, scheme, 0.5 if scheme == "SLEV" else None)


def test_pl_all_zero_degenerate():
    d = Dataset(design=np.zeros((3, 1)), response=np.zeros(3))
    with pytest.raises(DegenerateDistributionError):
        compute_probabilities(d, "PL")


def test_alpha_validation():
    d = gaussian_dataset(1, 20, 2)
    with pytest.raises(ValidationError):
        compute_probabilities(d, "SLEV", 1.5)
    with pytest.raises(ValidationError):
        compute_probabilities(d, "BLEV", 0.5)
    with pytest.raises(ValidationError):
        compute_probabilities(d, "nope")


def test_probability_vector_validation():
    with pytest.raises(ValidationError):
        ProbabilityVector(np.array([0.5, 0.4]), "RAND")  # does not sum to 1
    with pytest.raises(ValidationError):
        ProbabilityVector(np.array([1.5, -0.5]), "RAND")
