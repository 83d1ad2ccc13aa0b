"""Empirical MSE benchmark: bootstrap replicates of every subsampling method.

Protocol: fit OLS once on the input data; then, per replicate, bootstrap
n rows with replacement, run each method on the bootstrap sample at each
subsample size r, and accumulate the squared distance between the
method's coefficients and the full-data OLS fit. EMSE is the mean over
replicates (default 100) on the default size grid r = 5p, 10p, 15p, 20p.

Every replicate's randomness is keyed by (master seed, replicate index,
method name), so reports are bit-identical no matter how many worker
threads run the replicates or in which order methods are listed.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, ols_fit
from .errors import SubLsqError, ValidationError
from .optdesign import exchange_improve, greedy_select, iboss_select
from .probs import DEFAULT_SLEV_ALPHA, compute_probabilities
from .rng import SeedLike, derive_rng
from .sampler import draw, subsample_estimate
from .volume import volume_sample

DESIGN_FAMILIES = ("gaussian", "student_t", "t5_line")
REGISTERED_METHODS = (
    "OLS",
    "RAND",
    "BLEV",
    "SLEV",
    "IC",
    "RL",
    "PL",
    "IBOSS",
    "GREEDY",
    "EXCHANGE",
    "VOL",
    "LEVVOL",
)
_WEIGHTED_SCHEMES = ("BLEV", "SLEV", "IC", "RL", "PL")

DEFAULT_REPS = 100
DEFAULT_R_MULTIPLES = (5, 10, 15, 20)

__all__ = [
    "DESIGN_FAMILIES",
    "REGISTERED_METHODS",
    "DEFAULT_REPS",
    "DEFAULT_R_MULTIPLES",
    "SyntheticSpec",
    "t5_line_spec",
    "generate_synthetic",
    "BenchRecord",
    "BenchmarkReport",
    "default_r_grid",
    "run_emse",
]


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic regression dataset.

    ``t5_line`` is the heavy-tailed toy model: an intercept column plus one
    t(5) column with coefficients (1, 1), the setting where uniform
    subsampling visibly falls apart at small r.
    """

    n: int
    p: int
    design_family: str
    beta0: tuple[float, ...]
    noise_sd: float
    df: float | None = None

    def __post_init__(self):
        if self.design_family not in DESIGN_FAMILIES:
            raise ValidationError(
                f"design_family must be one of {DESIGN_FAMILIES}, got {self.design_family!r}"
            )
        if self.n < 1 or self.p < 1:
            raise ValidationError("n and p must be positive")
        if len(self.beta0) != self.p:
            raise ValidationError(f"beta0 must have length p={self.p}")
        if not self.noise_sd >= 0:
            raise ValidationError("noise_sd must be nonnegative")
        if self.design_family == "student_t":
            if self.df is None or not self.df > 2:
                raise ValidationError("student_t needs df > 2")
        elif self.df is not None:
            raise ValidationError(f"df is only meaningful for student_t, got {self.df}")
        if self.design_family == "t5_line" and self.p != 2:
            raise ValidationError("the t5_line family is intercept + one column, so p=2")


def t5_line_spec(n: int = 1000, noise_sd: float = 1.0) -> SyntheticSpec:
    """The canonical heavy-tailed benchmark spec: y = 1 + x + noise, x ~ t(5)."""
    return SyntheticSpec(n=n, p=2, design_family="t5_line", beta0=(1.0, 1.0), noise_sd=noise_sd)


def generate_synthetic(spec: SyntheticSpec, seed: SeedLike) -> Dataset:
    """Draw a dataset from the spec; identical (spec, seed) pairs are
    byte-identical."""
    rng = derive_rng(seed, "synthetic")
    if spec.design_family == "gaussian":
        design = rng.standard_normal((spec.n, spec.p))
    elif spec.design_family == "student_t":
        design = rng.standard_t(spec.df, size=(spec.n, spec.p))
    else:
        design = np.column_stack([np.ones(spec.n), rng.standard_t(5.0, size=spec.n)])
    response = design @ np.asarray(spec.beta0, dtype=np.float64)
    if spec.noise_sd > 0:
        response = response + spec.noise_sd * rng.standard_normal(spec.n)
    return Dataset(design=design, response=response)


@dataclass(frozen=True)
class BenchRecord:
    """EMSE of one (method, r) cell.

    ``failed`` is set when the method errored on more than half of the
    replicates; the EMSE statistics then refer to no replicates and are
    NaN. Otherwise they summarize the successful replicates only.
    """

    method: str
    r: int
    emse: float
    emse_sd: float
    mean_time_ms: float
    n_ok: int
    n_failed: int
    failed: bool


@dataclass(frozen=True)
class BenchmarkReport:
    records: tuple[BenchRecord, ...]
    reps: int
    seed: SeedLike
    dataset_fingerprint: str
    r_values: tuple[int, ...] = field(default=())
    methods: tuple[str, ...] = field(default=())


def default_r_grid(p: int) -> tuple[int, ...]:
    return tuple(m * p for m in DEFAULT_R_MULTIPLES)


def dataset_fingerprint(data: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(data.design.shape, dtype=np.int64).tobytes())
    h.update(data.design.tobytes())
    h.update(data.response.tobytes())
    return h.hexdigest()


def _method_beta(
    method: str,
    sample: Dataset,
    r: int,
    seed_key: tuple,
    alpha: float,
    criterion: str,
) -> np.ndarray:
    if method == "OLS":
        return ols_fit(sample).beta
    if method == "RAND":
        pv = compute_probabilities(sample, "RAND")
        return subsample_estimate(sample, draw(pv, r, seed_key), "plain").beta
    if method in _WEIGHTED_SCHEMES:
        pv = compute_probabilities(sample, method, alpha if method == "SLEV" else None)
        return subsample_estimate(sample, draw(pv, r, seed_key), "weighted").beta
    if method == "IBOSS":
        sel = iboss_select(sample, r)
        return ols_fit(sample.take_rows(sel.indices)).beta
    if method == "GREEDY":
        sel = greedy_select(sample, r, criterion)
        return ols_fit(sample.take_rows(sel.indices)).beta
    if method == "EXCHANGE":
        sel = exchange_improve(sample, greedy_select(sample, r, criterion))
        return ols_fit(sample.take_rows(sel.indices)).beta
    if method == "VOL":
        idx = volume_sample(sample, r, "standard", seed_key)
        return ols_fit(sample.take_rows(idx)).beta
    if method == "LEVVOL":
        idx = volume_sample(sample, r, "leveraged", seed_key)
        return ols_fit(sample.take_rows(idx)).beta
    raise ValidationError(f"unknown method {method!r}")


def run_emse(
    data: Dataset,
    methods,
    r_values,
    reps: int = DEFAULT_REPS,
    seed: SeedLike = 0,
    alpha: float = DEFAULT_SLEV_ALPHA,
    criterion: str = "D",
    workers: int = 1,
) -> BenchmarkReport:
    """Bootstrap-replicate EMSE of each method at each subsample size.

    Replicates are embarrassingly parallel; pass ``workers > 1`` to spread
    them over threads. The report is identical for any worker count.
    """
    methods = tuple(m.upper() for m in methods)
    for m in methods:
        if m not in REGISTERED_METHODS:
            raise ValidationError(f"unknown method {m!r}; registered: {REGISTERED_METHODS}")
    r_values = tuple(int(r) for r in r_values)
    for r in r_values:
        if r < data.p:
            raise ValidationError(f"subsample size r={r} must be at least p={data.p}")
    if reps < 1:
        raise ValidationError("reps must be at least 1")
    if workers < 1:
        raise ValidationError("workers must be at least 1")

    beta_full = ols_fit(data).beta
    n = data.n

    def one_replicate(rep: int) -> dict:
        boot_rng = derive_rng(seed, "bootstrap", rep)
        sample = data.take_rows(boot_rng.integers(0, n, size=n))
        cell: dict = {}
        for method in methods:
            for r in r_values:
                t0 = time.perf_counter()
                try:
                    beta = _method_beta(
                        method, sample, r, (seed, "method", method, rep, r), alpha, criterion
                    )
                    diff = beta - beta_full
                    result = float(diff @ diff)
                except (SubLsqError, np.linalg.LinAlgError):
                    result = None
                cell[(method, r)] = (result, (time.perf_counter() - t0) * 1e3)
        return cell

    if workers == 1:
        cells = [one_replicate(i) for i in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(one_replicate, range(reps)))

    records = []
    for method in methods:
        for r in r_values:
            sq = [c[(method, r)][0] for c in cells]
            times = [c[(method, r)][1] for c in cells]
            ok = [v for v in sq if v is not None]
            n_failed = reps - len(ok)
            failed = 2 * n_failed > reps
            if failed or not ok:
                emse, sd = float("nan"), float("nan")
                failed = True
            else:
                emse = float(np.mean(ok))
                sd = float(np.std(ok, ddof=1)) if len(ok) > 1 else 0.0
            records.append(
                BenchRecord(
                    method=method,
                    r=r,
                    emse=emse,
                    emse_sd=sd,
                    mean_time_ms=float(np.mean(times)),
                    n_ok=len(ok),
                    n_failed=n_failed,
                    failed=failed,
                )
            )
    return BenchmarkReport(
        records=tuple(records),
        reps=reps,
        seed=seed,
        dataset_fingerprint=dataset_fingerprint(data),
        r_values=r_values,
        methods=methods,
    )
