"""Command-line interface: CSV in, JSON out.

Subcommands: fit, probs, subsample, select, amse, bench, simulate. Every
run writes a single JSON document {schema_version, command, config,
results, timings_ms} to --output or stdout, echoing the fully resolved
configuration (including the seed, which defaults to a fixed constant so
runs are reproducible by default). Exit codes: 0 success, 1 input error,
2 numerical failure.

Timing is only reported under --timings: wall-clock values would break
the guarantee that rerunning a command with its echoed config yields
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import bench as bench_mod
from .asymptotics import (
    TARGETS,
    avar_matrix,
    regularity_diagnostics,
    sigma2_estimate,
    trace_amse,
)
from .core import Dataset, ols_fit
from .errors import NumericalError, ValidationError
from .optdesign import exchange_improve, greedy_select, iboss_select
from .probs import SCHEMES, compute_probabilities
from .sampler import draw, subsample_estimate
from .volume import volume_sample

SCHEMA_VERSION = "1"
DEFAULT_SEED = 12345

__all__ = ["RunConfig", "parse_csv", "main"]


@dataclass(frozen=True)
class RunConfig:
    """Column selection and preprocessing for CSV ingestion."""

    response_column: str | None = None
    predictor_columns: tuple[str, ...] | None = None
    log_columns: tuple[str, ...] = field(default=())
    drop_head_rows: int = 0


def _resolve_column(header: list[str], spec: str) -> int:
    if spec in header:
        return header.index(spec)
    try:
        idx = int(spec)
    except ValueError:
        raise ValidationError(
            f"column {spec!r} not found in header {header}"
        ) from None
    if not 0 <= idx < len(header):
        raise ValidationError(f"column index {idx} out of range for {len(header)} columns")
    return idx


def parse_csv(path: str, config: RunConfig) -> Dataset:
    """Read a headered CSV into a Dataset.

    Order of operations: drop leading data rows, log-transform the
    configured columns, then select predictors and response. Every bad
    cell is reported with its file line and column name; a missing
    response column yields an all-zero response (the probability and
    selection subcommands never look at it).
    """
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path} is empty; a header row is required") from None
        header = [h.strip() for h in header]
        raw_rows: list[tuple[int, list[str]]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path} line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            raw_rows.append((lineno, row))

    if config.drop_head_rows < 0:
        raise ValidationError("drop_head_rows must be nonnegative")
    raw_rows = raw_rows[config.drop_head_rows :]
    if not raw_rows:
        raise ValidationError(f"{path}: no data rows left after drop_head_rows")

    values = np.empty((len(raw_rows), len(header)))
    for i, (lineno, row) in enumerate(raw_rows):
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ValidationError(
                    f"{path} line {lineno}, column {header[j]!r}: "
                    f"non-numeric value {cell.strip()!r}"
                ) from None

    for name in config.log_columns:
        j = _resolve_column(header, name)
        bad = np.flatnonzero(values[:, j] <= 0)
        if bad.size:
            lineno = raw_rows[int(bad[0])][0]
            raise ValidationError(
                f"{path} line {lineno}, column {header[j]!r}: "
                f"log transform needs positive values, got {values[int(bad[0]), j]}"
            )
        values[:, j] = np.log(values[:, j])

    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise ValidationError(
            f"{path} line {raw_rows[int(i)][0]}, column {header[int(j)]!r}: non-finite value"
        )

    if config.response_column is not None:
        resp_idx = _resolve_column(header, config.response_column)
        response = values[:, resp_idx]
    else:
        resp_idx = None
        response = np.zeros(len(raw_rows))

    if config.predictor_columns is not None:
        pred_idx = [_resolve_column(header, c) for c in config.predictor_columns]
    else:
        pred_idx = [j for j in range(len(header)) if j != resp_idx]
    if not pred_idx:
        raise ValidationError("no predictor columns selected")
    return Dataset(design=values[:, pred_idx], response=response)


def _split_list(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _load_dataset(args, need_response: bool) -> Dataset:
    if args.input is None:
        raise ValidationError("--input is required for this subcommand")
    if need_response and args.response is None:
        raise ValidationError("--response is required for this subcommand")
    config = RunConfig(
        response_column=args.response,
        predictor_columns=_split_list(args.predictors) or None,
        log_columns=_split_list(args.log_columns),
        drop_head_rows=args.drop_head_rows,
    )
    data = parse_csv(args.input, config)
    if getattr(args, "intercept", False):
        data = Dataset(
            design=np.column_stack([np.ones(data.n), data.design]),
            response=data.response,
        )
    return data


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _add_data_flags(sp):
    sp.add_argument("--input", help="CSV file with a header row")
    sp.add_argument("--response", help="response column name or index")
    sp.add_argument("--predictors", help="comma-separated predictor columns (default: all others)")
    sp.add_argument("--log-columns", dest="log_columns", help="columns to log-transform")
    sp.add_argument("--drop-head-rows", dest="drop_head_rows", type=int, default=0)
    sp.add_argument("--intercept", action="store_true", help="prepend a column of ones")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sublsq",
        description="Subsampling estimators for large-scale least squares",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the JSON document (CSV for simulate) here")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit", parents=[common], help="full ordinary least squares")
    _add_data_flags(sp)

    sp = sub.add_parser("probs", parents=[common], help="per-row sampling probabilities")
    _add_data_flags(sp)
    sp.add_argument("--scheme", required=True, help=f"one of {', '.join(SCHEMES)}")
    sp.add_argument("--alpha", type=float, default=None, help="SLEV mixing weight")

    sp = sub.add_parser("subsample", parents=[common], help="one draw plus its estimate")
    _add_data_flags(sp)
    sp.add_argument("--scheme", required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--mode", choices=("plain", "weighted"), default="weighted")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = sub.add_parser("select", parents=[common], help="deterministic or volume subset selection")
    _add_data_flags(sp)
    sp.add_argument(
        "--method",
        required=True,
        choices=("iboss", "greedy", "exchange", "volume-standard", "volume-leveraged"),
    )
    sp.add_argument("--criterion", choices=("A", "D", "E"), default="D")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = sub.add_parser("amse", parents=[common], help="asymptotic variance and trace-AMSE")
    _add_data_flags(sp)
    sp.add_argument("--scheme", required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--sigma2", type=float, default=None, help="noise variance (default: estimated)")

    sp = sub.add_parser("bench", parents=[common], help="bootstrap EMSE benchmark")
    _add_data_flags(sp)
    sp.add_argument("--synthetic", choices=("t5_line",), help="use built-in synthetic data instead of --input")
    sp.add_argument("--n", type=int, default=1000, help="synthetic sample size")
    sp.add_argument("--methods", default="RAND,BLEV,SLEV,IC,RL,PL")
    sp.add_argument("--r", help="comma-separated subsample sizes (default 5p,10p,15p,20p)")
    sp.add_argument("--reps", type=int, default=bench_mod.DEFAULT_REPS)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--criterion", choices=("A", "D", "E"), default="D")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--table", action="store_true", help="also print an aligned text table")
    sp.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical reruns)")

    sp = sub.add_parser("simulate", parents=[common], help="write synthetic data to CSV")
    sp.add_argument("--family", choices=bench_mod.DESIGN_FAMILIES, default="t5_line")
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--df", type=float, default=None)
    sp.add_argument("--beta0", help="comma-separated coefficients (default: all ones)")
    sp.add_argument("--noise-sd", dest="noise_sd", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    return parser


def _config_echo(args) -> dict:
    skip = {"command", "output"}
    return {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip}


def _run_fit(args):
    data = _load_dataset(args, need_response=True)
    fit = ols_fit(data)
    return {
        "beta": fit.beta,
        "rank": fit.rank,
        "residual_ss": fit.residual_ss,
        "n": data.n,
        "p": data.p,
    }


def _run_probs(args):
    data = _load_dataset(args, need_response=False)
    pv = compute_probabilities(data, args.scheme, args.alpha)
    out = {"scheme": pv.scheme, "probs": pv.probs}
    if pv.alpha is not None:
        out["alpha"] = pv.alpha
    return out


def _run_subsample(args):
    data = _load_dataset(args, need_response=True)
    pv = compute_probabilities(data, args.scheme, args.alpha)
    d = draw(pv, args.r, args.seed)
    est = subsample_estimate(data, d, args.mode)
    return {
        "scheme": pv.scheme,
        "mode": args.mode,
        "indices": d.indices,
        "draw_probs": d.draw_probs,
        "beta": est.beta,
        "rank": est.rank,
        "residual_ss": est.residual_ss,
    }


def _run_select(args):
    data = _load_dataset(args, need_response=False)
    if args.method == "iboss":
        sel = iboss_select(data, args.r)
        return {"method": "iboss", "indices": sel.indices, "value": sel.value}
    if args.method == "greedy":
        sel = greedy_select(data, args.r, args.criterion)
        return {"method": "greedy", "criterion": sel.criterion, "indices": sel.indices, "value": sel.value}
    if args.method == "exchange":
        sel = exchange_improve(data, greedy_select(data, args.r, args.criterion))
        return {"method": "exchange", "criterion": sel.criterion, "indices": sel.indices, "value": sel.value}
    variant = args.method.removeprefix("volume-")
    idx = volume_sample(data, args.r, variant, args.seed)
    return {"method": args.method, "indices": idx}


def _run_amse(args):
    data = _load_dataset(args, need_response=True)
    pv = compute_probabilities(data, args.scheme, args.alpha)
    sigma2 = args.sigma2 if args.sigma2 is not None else sigma2_estimate(data)
    av = avar_matrix(data, pv, args.r, sigma2)
    diag = regularity_diagnostics(data, pv, args.r)
    return {
        "scheme": pv.scheme,
        "r": args.r,
        "sigma2": sigma2,
        "avar_trace": av.trace,
        "avar_matrix": av.matrix,
        "trace_amse": {t: trace_amse(data, pv, args.r, sigma2, t) for t in TARGETS},
        "diagnostics": {
            "lambda_min": diag.lambda_min,
            "lambda_max": diag.lambda_max,
            "pi_min": diag.pi_min,
            "condition_ratio": diag.condition_ratio,
        },
    }


def _render_table(report) -> str:
    r_values = report.r_values
    rows = [["Method"] + [f"r={r}" for r in r_values]]
    for method in report.methods:
        line = [method]
        for r in r_values:
            rec = next(x for x in report.records if x.method == method and x.r == r)
            line.append("failed" if rec.failed else f"{rec.emse:.4g}({rec.emse_sd:.2g})")
        rows.append(line)
    widths = [max(len(row[j]) for row in rows) for j in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)) for row in rows
    )


def _run_bench(args):
    if args.synthetic:
        data = bench_mod.generate_synthetic(bench_mod.t5_line_spec(n=args.n), args.seed)
    else:
        data = _load_dataset(args, need_response=True)
    methods = _split_list(args.methods)
    r_values = [int(v) for v in _split_list(args.r)] if args.r else bench_mod.default_r_grid(data.p)
    report = bench_mod.run_emse(
        data,
        methods,
        r_values,
        reps=args.reps,
        seed=args.seed,
        alpha=args.alpha if args.alpha is not None else 0.9,
        criterion=args.criterion,
        workers=args.workers,
    )
    records = []
    for rec in report.records:
        records.append(
            {
                "method": rec.method,
                "r": rec.r,
                "emse": rec.emse,
                "emse_sd": rec.emse_sd,
                "mean_time_ms": rec.mean_time_ms if args.timings else None,
                "n_ok": rec.n_ok,
                "n_failed": rec.n_failed,
                "failed": rec.failed,
            }
        )
    results = {
        "records": records,
        "reps": report.reps,
        "seed": report.seed,
        "dataset_fingerprint": report.dataset_fingerprint,
    }
    table = _render_table(report) if args.table else None
    return results, table


def _run_simulate(args):
    if args.family == "t5_line":
        spec = bench_mod.t5_line_spec(n=args.n, noise_sd=args.noise_sd)
    else:
        beta0 = (
            tuple(float(v) for v in _split_list(args.beta0))
            if args.beta0
            else tuple(1.0 for _ in range(args.p))
        )
        spec = bench_mod.SyntheticSpec(
            n=args.n,
            p=args.p,
            design_family=args.family,
            beta0=beta0,
            noise_sd=args.noise_sd,
            df=args.df,
        )
    data = bench_mod.generate_synthetic(spec, args.seed)
    if args.output is None:
        raise ValidationError("simulate requires --output for the CSV destination")
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(data.p)] + ["y"])
        for i in range(data.n):
            writer.writerow(
                [repr(float(v)) for v in data.design[i]] + [repr(float(data.response[i]))]
            )
    return {
        "path": args.output,
        "n": data.n,
        "p": data.p,
        "family": spec.design_family,
        "fingerprint": bench_mod.dataset_fingerprint(data),
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract here is exit 1
        return 0 if exc.code in (0, None) else 1

    t0 = time.perf_counter()
    table = None
    try:
        if args.command == "fit":
            results = _run_fit(args)
        elif args.command == "probs":
            results = _run_probs(args)
        elif args.command == "subsample":
            results = _run_subsample(args)
        elif args.command == "select":
            results = _run_select(args)
        elif args.command == "amse":
            results = _run_amse(args)
        elif args.command == "bench":
            results, table = _run_bench(args)
        else:
            results = _run_simulate(args)
    except ValidationError as exc:
        print(f"sublsq: input error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"sublsq: numerical failure: {exc}", file=sys.stderr)
        return 2

    elapsed_ms = (time.perf_counter() - t0) * 1e3
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": _config_echo(args),
        "results": _jsonable(results),
        "timings_ms": elapsed_ms if getattr(args, "timings", False) else None,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"

    if args.command == "simulate" or args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if table is not None:
        sys.stdout.write(table + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
