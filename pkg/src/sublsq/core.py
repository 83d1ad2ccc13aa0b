"""Dense least-squares kernels: OLS, weighted LS, and leverage scores.

Everything else in the package builds on these three operations. Fits are
computed from a rank-revealing SVD solve and always return the minimum-norm
solution, so rank-deficient designs degrade gracefully instead of raising.
All functions are pure and thread-safe; returned arrays are frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "Dataset",
    "EstimateResult",
    "LeverageVector",
    "ols_fit",
    "weighted_ls_fit",
    "leverage_scores",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _as_finite_array(values, name: str, ndim: int) -> np.ndarray:
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return a


@dataclass(frozen=True)
class Dataset:
    """An n x p design matrix paired with an n-vector of responses.

    Rows are observations, columns are predictors. Entries must be finite.
    No intercept column is added implicitly; include one explicitly if the
    model calls for it.
    """

    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        design = _as_finite_array(self.design, "design", ndim=2)
        response = _as_finite_array(self.response, "response", ndim=1)
        n, p = design.shape
        if n < 1 or p < 1:
            raise ValidationError(f"design must be at least 1x1, got {n}x{p}")
        if response.shape[0] != n:
            raise ValidationError(
                f"response length {response.shape[0]} does not match {n} design rows"
            )
        object.__setattr__(self, "design", _freeze(design))
        object.__setattr__(self, "response", _freeze(response))

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]

    def take_rows(self, indices) -> "Dataset":
        """Dataset restricted to the given rows (repeats allowed)."""
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.design[idx], self.response[idx])


@dataclass(frozen=True)
class EstimateResult:
    """A fitted coefficient vector with method metadata and fit diagnostics.

    ``rank`` is the effective rank of the design actually used; a value
    below p flags that the fit fell back to the minimum-norm solution.
    """

    beta: np.ndarray
    method: str
    rank: int
    residual_ss: float

    def __post_init__(self):
        beta = _as_finite_array(self.beta, "beta", ndim=1)
        object.__setattr__(self, "beta", _freeze(beta))
        if self.residual_ss < 0:
            raise ValidationError("residual_ss must be nonnegative")


@dataclass(frozen=True)
class LeverageVector:
    """Diagonal of the projection onto the design's column space.

    For a full-column-rank design with n > p every score lies strictly in
    (0, 1) except for rows orthogonal to the rest, and the scores sum to
    the design rank (p when full rank).
    """

    scores: np.ndarray = field()

    def __post_init__(self):
        scores = _as_finite_array(self.scores, "scores", ndim=1)
        object.__setattr__(self, "scores", _freeze(scores))


def _rank_tolerance(s: np.ndarray, n: int, p: int) -> float:
    # Standard numerical-rank convention: cutoff relative to largest
    # singular value, scaled by the bigger matrix dimension.
    if s.size == 0:
        return 0.0
    return max(n, p) * np.finfo(np.float64).eps * float(s[0])


def thin_svd(design: np.ndarray):
    """Thin SVD plus numerical rank: returns (U, s, Vt, rank)."""
    U, s, Vt = np.linalg.svd(design, full_matrices=False)
    n, p = design.shape
    rank = int(np.count_nonzero(s > _rank_tolerance(s, n, p)))
    return U, s, Vt, rank


def _minimum_norm_solve(design: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, int]:
    """Minimum-norm least-squares solution and the numerical rank used."""
    U, s, Vt, rank = thin_svd(design)
    if rank == 0:
        return np.zeros(design.shape[1]), 0
    coeffs = (U[:, :rank].T @ rhs) / s[:rank]
    return Vt[:rank].T @ coeffs, rank


def ols_fit(data: Dataset) -> EstimateResult:
    """Ordinary least squares.

    Returns the minimum-norm solution of ``min ||y - X b||^2``. For a
    full-column-rank design this equals the usual normal-equations
    solution; on singular designs the pseudo-inverse solution is used.
    """
    beta, rank = _minimum_norm_solve(data.design, data.response)
    resid = data.response - data.design @ beta
    return EstimateResult(
        beta=beta,
        method="OLS",
        rank=rank,
        residual_ss=float(resid @ resid),
    )


def weighted_ls_fit(data: Dataset, weights) -> EstimateResult:
    """Weighted least squares: ``min (y - X b)' diag(w) (y - X b)``.

    Realized by rescaling each row with the square root of its weight and
    solving the resulting ordinary problem, which is numerically stabler
    than forming the weight matrix. All weights must be strictly positive
    and finite. ``residual_ss`` is the minimized weighted objective.
    """
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] != data.n:
        raise ValidationError(f"weights length {w.shape[0]} does not match n={data.n}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    if np.any(w <= 0):
        raise ValidationError("weights must be strictly positive")
    sw = np.sqrt(w)
    beta, rank = _minimum_norm_solve(data.design * sw[:, None], data.response * sw)
    resid = data.response - data.design @ beta
    return EstimateResult(
        beta=beta,
        method="WLS",
        rank=rank,
        residual_ss=float(w @ (resid * resid)),
    )


def leverage_scores(data: Dataset) -> LeverageVector:
    """Leverage score of every row: the squared row norms of the
    orthonormal column-space basis from the thin SVD.

    For a full-rank design this equals ``x_i' (X'X)^{-1} x_i`` and the
    scores sum to p.
    """
    U, _, _, rank = thin_svd(data.design)
    scores = np.einsum("ij,ij->i", U[:, :rank], U[:, :rank])
    # Projection diagonals live in [0, 1]; shave off rounding overshoot.
    np.clip(scores, 0.0, 1.0, out=scores)
    return LeverageVector(scores=scores)
