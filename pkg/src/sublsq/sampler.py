"""Subsample draws and subsample least-squares estimates.

``draw`` samples row indices i.i.d. with replacement from a probability
vector using the alias method (one O(n) table build, O(1) per draw).
``subsample_estimate`` then fits either a plain OLS on the drawn rows or
a weighted LS with weights equal to the reciprocal drawn probabilities,
which is the correction that keeps non-uniform schemes asymptotically
unbiased for the full-sample estimator.

Draws are a pure function of (probabilities, r, seed): the same triple is
bit-identical no matter where or when it runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, EstimateResult, ols_fit, weighted_ls_fit
from .errors import ValidationError
from .probs import ProbabilityVector
from .rng import SeedLike, derive_rng

__all__ = ["SubsampleDraw", "alias_table", "draw", "subsample_estimate"]

MODES = ("plain", "weighted")


@dataclass(frozen=True)
class SubsampleDraw:
    """An ordered with-replacement draw of row indices.

    ``draw_probs[k]`` is the sampling probability of ``indices[k]`` under
    the vector the draw came from; it is what the weighted estimator
    inverts.
    """

    indices: np.ndarray
    draw_probs: np.ndarray
    seed: SeedLike
    with_replacement: bool = True

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.intp)
        dp = np.ascontiguousarray(self.draw_probs, dtype=np.float64)
        if idx.ndim != 1 or dp.ndim != 1 or idx.shape != dp.shape:
            raise ValidationError("indices and draw_probs must be matching vectors")
        if idx.size < 1:
            raise ValidationError("a draw must contain at least one index")
        if np.any(idx < 0):
            raise ValidationError("indices must be nonnegative")
        if np.any(dp <= 0) or np.any(dp > 1):
            raise ValidationError("draw_probs must lie in (0, 1]")
        idx.flags.writeable = False
        dp.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "draw_probs", dp)

    @property
    def r(self) -> int:
        return self.indices.shape[0]


def alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Walker/Vose alias table: (acceptance probabilities, alias targets).

    Zero-probability entries are valid; their cells always redirect, so
    those indices are never produced.
    """
    p = np.asarray(probs, dtype=np.float64)
    n = p.shape[0]
    accept = np.zeros(n)
    alias = np.zeros(n, dtype=np.intp)
    scaled = p * n
    small = np.flatnonzero(scaled < 1.0).tolist()
    large = np.flatnonzero(scaled >= 1.0).tolist()
    while small and large:
        s = small.pop()
        big = large.pop()
        accept[s] = scaled[s]
        alias[s] = big
        scaled[big] -= 1.0 - scaled[s]
        (small if scaled[big] < 1.0 else large).append(big)
    # Leftovers are full cells up to rounding.
    for i in small + large:
        accept[i] = 1.0
        alias[i] = i
    return accept, alias


def draw(probs: ProbabilityVector, r: int, seed: SeedLike) -> SubsampleDraw:
    """Draw ``r`` indices i.i.d. with replacement from ``probs``.

    Identical (probs, r, seed) triples yield bit-identical draws.
    """
    if r < 1:
        raise ValidationError(f"subsample size must be at least 1, got {r}")
    accept, alias = alias_table(probs.probs)
    rng = derive_rng(seed)
    cells = rng.integers(0, probs.n, size=r)
    u = rng.random(r)
    indices = np.where(u < accept[cells], cells, alias[cells])
    return SubsampleDraw(
        indices=indices,
        draw_probs=probs.probs[indices],
        seed=seed,
    )


def subsample_estimate(data: Dataset, draw: SubsampleDraw, mode: str) -> EstimateResult:
    """Least-squares estimate from a subsample draw.

    ``plain`` fits ordinary least squares on the drawn rows; ``weighted``
    fits weighted least squares with weights 1/draw_probs. A rank-deficient
    subsample design falls back to the minimum-norm solution, flagged by
    ``rank < p`` on the result.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if int(draw.indices.max()) >= data.n:
        raise ValidationError("draw indices out of range for this dataset")
    sub = data.take_rows(draw.indices)
    if mode == "plain":
        fit = ols_fit(sub)
    else:
        fit = weighted_ls_fit(sub, 1.0 / draw.draw_probs)
    return EstimateResult(
        beta=fit.beta,
        method=f"subsample-{mode}",
        rank=fit.rank,
        residual_ss=fit.residual_ss,
    )
