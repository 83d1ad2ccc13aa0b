"""Asymptotic variance of weighted subsample estimators and related tools.

For a weighted subsample least-squares estimator drawn with probabilities
``pi`` and subsample size ``r``, the asymptotic variance is

    sigma^2 (X'X)^{-1} + sigma^2 (X'X)^{-1} X' Omega X (X'X)^{-1},

with ``Omega = diag(1 / (r pi_i))``: the first part is the full-sample OLS
variance, the second the price of subsampling. ``trace_amse`` evaluates the
matching scalar asymptotic MSE for three estimation targets (coefficients,
fitted line, moment vector); each target's second term is minimized by the
probability vector proportional to the corresponding per-row norm (IC, RL,
PL respectively), which is the property the tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, ols_fit, thin_svd
from .errors import RankError, ValidationError
from .probs import ProbabilityVector

TARGETS = ("beta", "Xbeta", "XtXbeta")

__all__ = [
    "TARGETS",
    "AsymptoticVariance",
    "RegularityDiagnostics",
    "avar_matrix",
    "trace_amse",
    "sigma2_estimate",
    "regularity_diagnostics",
]


@dataclass(frozen=True)
class AsymptoticVariance:
    """A p x p asymptotic covariance matrix with its inputs."""

    matrix: np.ndarray
    sigma2: float
    r: int

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("matrix must be square")
        scale = float(np.max(np.abs(m), initial=0.0))
        if float(np.max(np.abs(m - m.T), initial=0.0)) > 1e-10 * max(scale, 1.0):
            raise ValidationError("matrix must be symmetric within 1e-10")
        if float(np.min(np.linalg.eigvalsh(m))) < -1e-10 * max(scale, 1.0):
            raise ValidationError("matrix must be positive semi-definite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(frozen=True)
class RegularityDiagnostics:
    """Finite-sample quantities behind the estimator's regularity conditions.

    Reported, never enforced: the conditions themselves are asymptotic
    order statements with no finite-sample pass/fail reading.
    """

    lambda_min: float
    lambda_max: float
    pi_min: float
    condition_ratio: float


def _full_rank_svd(data: Dataset, what: str):
    U, s, Vt, rank = thin_svd(data.design)
    if rank < data.p:
        raise RankError(f"{what} requires a full-column-rank design")
    return U, s, Vt


def _check_probs(probs: ProbabilityVector, n: int) -> np.ndarray:
    pi = probs.probs
    if pi.shape[0] != n:
        raise ValidationError("probability vector length does not match the dataset")
    if np.any(pi <= 0):
        raise ValidationError(
            "every sampling probability must be strictly positive here; "
            "zero-probability rows make the weight matrix undefined"
        )
    return pi


def _check_scalars(r: int, sigma2: float) -> None:
    if r < 1:
        raise ValidationError(f"subsample size r must be at least 1, got {r}")
    if not sigma2 > 0 or not np.isfinite(sigma2):
        raise ValidationError(f"sigma2 must be a positive real, got {sigma2}")


def avar_matrix(
    data: Dataset, probs: ProbabilityVector, r: int, sigma2: float
) -> AsymptoticVariance:
    """Asymptotic covariance of the weighted subsample estimator."""
    _check_scalars(r, sigma2)
    U, s, Vt = _full_rank_svd(data, "the asymptotic variance")
    pi = _check_probs(probs, data.n)
    # X (X'X)^{-1} = U diag(1/s) V', row i is (X'X)^{-1} x_i transposed.
    T = (U / s) @ Vt
    omega = 1.0 / (r * pi)
    second = T.T @ (T * omega[:, None])
    ginv = (Vt.T / (s * s)) @ Vt
    m = sigma2 * (ginv + second)
    m = 0.5 * (m + m.T)
    return AsymptoticVariance(matrix=m, sigma2=float(sigma2), r=int(r))


def trace_amse(
    data: Dataset, probs: ProbabilityVector, r: int, sigma2: float, target: str
) -> float:
    """Scalar asymptotic MSE of the subsample estimator for one target.

    target = 'beta'    : coefficients; per-row norm ||(X'X)^{-1} x_i||^2
    target = 'Xbeta'   : fitted line;  per-row norm is the leverage h_ii
    target = 'XtXbeta' : moment vector; per-row norm ||x_i||^2

    In every case the value is sigma^2 * trace(fixed covariance of the
    target's full-sample estimator) plus (sigma^2/r) * sum_i norm_i/pi_i.
    """
    if target not in TARGETS:
        raise ValidationError(f"target must be one of {TARGETS}, got {target!r}")
    _check_scalars(r, sigma2)
    U, s, _ = _full_rank_svd(data, "the asymptotic MSE")
    pi = _check_probs(probs, data.n)
    if target == "beta":
        row_sq = np.einsum("ik,ik->i", U / s, U / s)
        leading = float(np.sum(1.0 / (s * s)))
    elif target == "Xbeta":
        row_sq = np.einsum("ik,ik->i", U, U)
        leading = float(data.p)
    else:
        row_sq = np.einsum("ij,ij->i", data.design, data.design)
        leading = float(np.sum(s * s))
    return sigma2 * leading + (sigma2 / r) * float(np.sum(row_sq / pi))


def sigma2_estimate(data: Dataset) -> float:
    """Residual noise variance from the full-sample OLS fit."""
    if data.n <= data.p:
        raise ValidationError(
            f"noise estimation needs n > p, got n={data.n}, p={data.p}"
        )
    fit = ols_fit(data)
    if fit.rank < data.p:
        raise RankError("noise estimation requires a full-column-rank design")
    return fit.residual_ss / (data.n - data.p)


def regularity_diagnostics(
    data: Dataset, probs: ProbabilityVector, r: int
) -> RegularityDiagnostics:
    """Eigen-extremes of X'X/n and the smallest sampling probability.

    ``condition_ratio`` equals the squared condition number of the design.
    """
    if r < 1:
        raise ValidationError(f"subsample size r must be at least 1, got {r}")
    s = np.linalg.svd(data.design, compute_uv=False)
    lam = (s * s) / data.n
    lambda_max = float(lam[0])
    lambda_min = float(lam[-1])
    pi = probs.probs
    if pi.shape[0] != data.n:
        raise ValidationError("probability vector length does not match the dataset")
    ratio = lambda_max / lambda_min if lambda_min > 0 else np.inf
    return RegularityDiagnostics(
        lambda_min=lambda_min,
        lambda_max=lambda_max,
        pi_min=float(np.min(pi)),
        condition_ratio=float(ratio),
    )
