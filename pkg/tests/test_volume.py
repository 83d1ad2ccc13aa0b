from collections import Counter
from itertools import combinations, product
from math import comb

import numpy as np
import pytest

from sublsq import (
    CapacityError,
    Dataset,
    NumericalError,
    ValidationError,
    leveraged_volume_distribution,
    standard_volume_distribution,
    volume_sample,
)


def _column_dataset(values):
    v = np.asarray(values, dtype=float)
    return Dataset(design=v[:, None], response=np.zeros(len(v)))


def _standard_oracle(X, r):
    """Brute force with explicit loops, no shared code with the library."""
    n, p = X.shape
    denom = comb(n - p, r - p) * np.linalg.det(X.T @ X)
    masses = {}
    for S in combinations(range(n), r):
        XS = X[list(S)]
        masses[S] = np.linalg.det(XS.T @ XS) / denom
    return masses


def _leveraged_oracle(X, r):
    n, p = X.shape
    G_inv = np.linalg.inv(X.T @ X)
    q = np.einsum("ij,jk,ik->i", X, G_inv, X) / p
    raw = {}
    for tau in product(range(n), repeat=r):
        A = np.zeros((p, p))
        w = 1.0
        for i in tau:
            A += np.outer(X[i], X[i]) / q[i]
            w *= q[i]
        raw[tau] = max(np.linalg.det(A), 0.0) * w
    total = sum(raw.values())
    return {k: v / total for k, v in raw.items()}


def _tv(draws, exact):
    counts = Counter(tuple(row) for row in np.atleast_2d(draws))
    m = sum(counts.values())
    keys = set(counts) | set(exact)
    return 0.5 * sum(abs(counts.get(k, 0) / m - exact.get(k, 0.0)) for k in keys)


def test_standard_column_example():
    d = _column_dataset([1.0, 2.0, 3.0])
    dist = standard_volume_distribution(d, 1)
    np.testing.assert_allclose(dist.masses, [1 / 14, 4 / 14, 9 / 14], atol=1e-12)


def test_standard_full_subset():
    d = _column_dataset([1.0, 2.0, 3.0])
    dist = standard_volume_distribution(d, 3)
    assert dist.subsets.shape == (1, 3)
    np.testing.assert_allclose(dist.masses, [1.0], atol=1e-12)
    idx = volume_sample(d, 3, "standard", 0)
    assert np.array_equal(idx, [0, 1, 2])


def test_standard_normalization_sweep():
    # the closed-form constant already normalizes: no renormalization happens
    rng = np.random.default_rng(17)
    for p in (1, 2, 3):
        for n in range(p + 1, 11):
            for r in range(p, n + 1):
                X = rng.standard_normal((n, p))
                d = Dataset(design=X, response=np.zeros(n))
                dist = standard_volume_distribution(d, r)
                assert abs(dist.masses.sum() - 1.0) <= 1e-10


def test_standard_matches_bruteforce_oracle():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((6, 2))
    d = Dataset(design=X, response=np.zeros(6))
    dist = standard_volume_distribution(d, 3)
    oracle = _standard_oracle(X, 3)
    for subset, mass in zip(dist.subsets, dist.masses):
        assert abs(mass - oracle[tuple(subset)]) < 1e-12


def test_standard_sampler_tv_against_enumeration():
    d = _column_dataset([1.0, 2.0, 3.0])
    draws = volume_sample(d, 1, "standard", 11, size=100_000)
    exact = {(0,): 1 / 14, (1,): 4 / 14, (2,): 9 / 14}
    assert _tv(draws, exact) <= 0.02


def test_leveraged_enumeration_matches_oracle():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((3, 2))
    d = Dataset(design=X, response=np.zeros(3))
    dist = leveraged_volume_distribution(d, 2)
    oracle = _leveraged_oracle(X, 2)
    for seq, mass in zip(dist.subsets, dist.masses):
        assert abs(mass - oracle[tuple(seq)]) < 1e-12


def test_leveraged_sampler_tv_against_enumeration():
    d = _column_dataset([1.0, 2.0, 3.0])
    oracle = _leveraged_oracle(d.design, 2)
    with pytest.warns(UserWarning):
        draws = volume_sample(d, 2, "leveraged", 23, size=100_000)
    assert _tv(draws, oracle) <= 0.02


def test_leveraged_rejection_path_tv():
    # force the rejection sampler at desk scale and compare to enumeration
    rng = np.random.default_rng(6)
    X = rng.standard_normal((3, 2))
    d = Dataset(design=X, response=np.zeros(3))
    oracle = _leveraged_oracle(X, 2)
    with pytest.warns(UserWarning):
        draws = volume_sample(d, 2, "leveraged", 29, size=100_000, enumeration_limit=1)
    assert _tv(draws, oracle) <= 0.02


def test_permutation_equivariance():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((6, 2))
    perm = np.array([3, 0, 5, 1, 4, 2])
    d1 = Dataset(design=X, response=np.zeros(6))
    d2 = Dataset(design=X[perm], response=np.zeros(6))
    m1 = {tuple(s): v for s, v in zip(*[standard_volume_distribution(d1, 3).subsets,
                                        standard_volume_distribution(d1, 3).masses])}
    inv = np.empty(6, dtype=int)
    inv[perm] = np.arange(6)
    dist2 = standard_volume_distribution(d2, 3)
    for subset, mass in zip(dist2.subsets, dist2.masses):
        original = tuple(sorted(perm[i] for i in subset))
        assert abs(mass - m1[original]) < 1e-12


def test_small_r_warns_but_proceeds():
    d = _column_dataset([1.0, 2.0, 3.0])
    with pytest.warns(UserWarning, match="r > 4 p"):
        volume_sample(d, 2, "leveraged", 0)


def test_capacity_and_validation_errors():
    rng = np.random.default_rng(1)
    big = Dataset(design=rng.standard_normal((25, 2)), response=np.zeros(25))
    with pytest.raises(CapacityError):
        standard_volume_distribution(big, 5)
    d = _column_dataset([1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        standard_volume_distribution(Dataset(design=np.ones((3, 2)) + np.arange(3)[:, None],
                                             response=np.zeros(3)), 1)  # r < p
    with pytest.raises(ValidationError):
        volume_sample(d, 1, "systematic", 0)


def test_rank_deficient_rejected():
    X = np.ones((4, 2))
    d = Dataset(design=X, response=np.zeros(4))
    with pytest.raises(NumericalError):
        standard_volume_distribution(d, 2)
    with pytest.raises(NumericalError):
        with pytest.warns(UserWarning):
            volume_sample(d, 2, "leveraged", 0)


def test_seeded_reproducibility():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((8, 2))
    d = Dataset(design=X, response=np.zeros(8))
    a = volume_sample(d, 3, "standard", 71, size=20)
    b = volume_sample(d, 3, "standard", 71, size=20)
    assert np.array_equal(a, b)
