"""Command line interface: estimate, predict, cv, bootstrap, simulate.

Numeric output is emitted with 12 significant digits so tables round-trip
through text exactly.  Every run that involves randomness or a resolved
configuration echoes it as a JSON sidecar (``<out>.meta.json`` next to the
output file, or one JSON line on stderr when writing to stdout), and the
``simulate`` echo is itself a valid ``--config`` file, so reruns reproduce
byte-identical numbers.

Exit codes: 0 success, 2 argument/validation/input failure, 3 estimator
failure (the message names the exception class).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .bandwidth import CvConfig, select_bandwidth
from .bootstrap import lmf_bootstrap
from .errors import EstimationError
from .estimators import (
    DEFAULT_GRID_COUNT,
    EstimatorConfig,
    GridSpec,
    RegressionSample,
    monotone_cdf,
    monotone_density,
    point_predict,
    smooth_cdf_estimate,
)
from .kernels import KERNEL_FAMILIES
from .simulation import (
    DgpSpec,
    EvalPoint,
    ExperimentConfig,
    run_experiment,
)

SEED_ENV_VAR = "MONOLLR_SEED"

_WINDOW_FLAGS = {
    "two-sided": "two_sided_exclude_target",
    "one-sided": "one_sided_left",
}

_ESTIMATE_MODES = {
    "lc": "local_constant",
    "llh": "hansen",
    "ll-raw": "local_linear",
}

_PREDICT_METHODS = {"lc": "LC", "ll": "LL", "llh": "LLH", "llm": "LLM"}


class CliError(Exception):
    """Input or validation failure reported with exit code 2."""


def _fmt(v) -> str:
    return f"{float(v):.12g}"


# ---------------------------------------------------------------------------
# dataset ingestion
# ---------------------------------------------------------------------------


def _parse_column(spec, header, role):
    """Resolve a column spec (index or header name) to an index."""
    if spec is None:
        if header is not None:
            for cand in (role, role.upper()):
                if cand in header:
                    return header.index(cand)
            raise CliError(
                f"no column named {role!r} in header {header}; use --{role}-col"
            )
        return {"x": 0, "y": 1}[role]
    try:
        return int(spec)
    except ValueError:
        pass
    if header is None:
        raise CliError(
            f"--{role}-col {spec!r} names a column but the file has no header"
        )
    if spec not in header:
        raise CliError(f"no column named {spec!r} in header {header}")
    return header.index(spec)


def load_dataset(
    path: str,
    x_col=None,
    y_col=None,
    has_header: bool = True,
    sort: bool = True,
) -> RegressionSample:
    """Read an (x, y) sample from a CSV file.

    Columns are picked by header name or zero-based index.  Non-numeric or
    non-finite cells are rejected with row/column diagnostics.  With
    ``sort=True`` rows are ordered by ascending ``x`` (stable, so ties keep
    file order).
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(c.strip() for c in row)]
    if not rows:
        raise CliError(f"{path}: file is empty")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise CliError(f"{path}: no data rows after header")
    xi = _parse_column(x_col, header, "x")
    yi = _parse_column(y_col, header, "y")

    def _cell(row_num, row, col):
        name = header[col] if header and col < len(header) else str(col)
        if col >= len(row):
            raise CliError(f"{path}: row {row_num} has no column {name!r}")
        text = row[col].strip()
        try:
            val = float(text)
        except ValueError:
            raise CliError(
                f"{path}: row {row_num}, column {name!r}: "
                f"non-numeric value {text!r}"
            ) from None
        if not np.isfinite(val):
            raise CliError(
                f"{path}: row {row_num}, column {name!r}: "
                f"non-finite value {text!r}"
            )
        return val

    first_data_row = 2 if has_header else 1
    xs, ys = [], []
    for offset, row in enumerate(rows):
        row_num = first_data_row + offset
        xs.append(_cell(row_num, row, xi))
        ys.append(_cell(row_num, row, yi))
    xs = np.array(xs)
    ys = np.array(ys)
    if sort:
        order = np.argsort(xs, kind="stable")
        xs, ys = xs[order], ys[order]
    try:
        return RegressionSample(xs, ys)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# shared argument plumbing
# ---------------------------------------------------------------------------


def _add_data_args(p):
    p.add_argument("--data", required=True, help="CSV file with the sample")
    p.add_argument("--x-col", default=None, help="x column name or index")
    p.add_argument("--y-col", default=None, help="y column name or index")
    p.add_argument(
        "--no-header", action="store_true", help="file has no header row"
    )
    p.add_argument(
        "--no-sort", action="store_true", help="keep file order (default sorts by x)"
    )


def _add_fit_args(p, with_h=True):
    p.add_argument("--b", type=float, help="bandwidth in observation counts")
    if with_h:
        p.add_argument(
            "--h", type=float, help="bandwidth in regressor units (alternative to --b)"
        )
    p.add_argument("--h0", type=float, help="response smoothing bandwidth")
    p.add_argument(
        "--kernel", choices=KERNEL_FAMILIES, default="gaussian", help="kernel family"
    )
    p.add_argument(
        "--window",
        choices=sorted(_WINDOW_FLAGS),
        default="two-sided",
        help="window mode at the evaluation point",
    )
    p.add_argument("--grid", default=None, help="response grid as LO:HI:N")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _load_sample(args) -> RegressionSample:
    return load_dataset(
        args.data,
        x_col=args.x_col,
        y_col=args.y_col,
        has_header=not args.no_header,
        sort=not args.no_sort,
    )


def _parse_grid(spec: str) -> GridSpec:
    parts = spec.split(":")
    if len(parts) != 3:
        raise CliError(f"--grid expects LO:HI:N, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliError(f"--grid expects numeric LO:HI:N, got {spec!r}") from None
    try:
        return GridSpec.from_count(lo, hi, count)
    except ValueError as exc:
        raise CliError(f"--grid: {exc}") from exc


def _resolve_bandwidth(args, n: int) -> float:
    h = getattr(args, "h", None)
    if args.b is not None and h is not None:
        raise CliError("pass either --b or --h, not both")
    if args.b is not None:
        return args.b
    if h is not None:
        return h * n
    raise CliError("a bandwidth is required (--b or --h)")


def _build_config(args, n: int) -> EstimatorConfig:
    b = _resolve_bandwidth(args, n)
    grid = _parse_grid(args.grid) if args.grid else None
    try:
        return EstimatorConfig(
            b=b,
            h0=args.h0,
            family=args.kernel,
            window=_WINDOW_FLAGS[args.window],
            grid=grid,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise CliError(
                    f"{SEED_ENV_VAR} must be an integer, got {env!r}"
                ) from None
        else:
            seed = 0
    if not (0 <= seed < 2**64):
        raise CliError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def _emit(args, lines, sidecar: dict):
    """Write output lines plus the configuration echo sidecar."""
    text = "\n".join(lines) + "\n"
    meta = json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        with open(args.out + ".meta.json", "w") as fh:
            fh.write(meta)
    else:
        sys.stdout.write(text)
        sys.stderr.write(json.dumps(sidecar, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_estimate(args) -> int:
    sample = _load_sample(args)
    cfg = _build_config(args, sample.n)
    if args.method == "llm":
        if args.algorithm == "clip-density":
            est = monotone_density(sample, args.x, cfg)
        else:
            est = monotone_cdf(sample, args.x, cfg)
    else:
        cfg = replace(cfg, mode=_ESTIMATE_MODES[args.method])
        est = smooth_cdf_estimate(sample, args.x, cfg)
    if est.density is not None:
        lines = ["y,cdf,density"]
        for y, c, d in zip(est.grid, est.cdf, est.density):
            lines.append(f"{_fmt(y)},{_fmt(c)},{_fmt(d)}")
    else:
        lines = ["y,cdf"]
        for y, c in zip(est.grid, est.cdf):
            lines.append(f"{_fmt(y)},{_fmt(c)}")
    sidecar = {
        "command": "estimate",
        "data": args.data,
        "x": args.x,
        "method": args.method,
        "algorithm": args.algorithm if args.method == "llm" else None,
        "b": cfg.b,
        "h0": cfg.resolve_h0(sample.n),
        "kernel": cfg.family,
        "window": cfg.window,
        "monotone": est.monotone,
        "n": sample.n,
    }
    _emit(args, lines, sidecar)
    return 0


def _cmd_predict(args) -> int:
    sample = _load_sample(args)
    cfg = _build_config(args, sample.n)
    method = _PREDICT_METHODS[args.method]
    if (args.x is None) == (args.eval_last is None):
        raise CliError("pass exactly one of --x or --eval-last")
    sidecar = {
        "command": "predict",
        "data": args.data,
        "method": args.method,
        "b": cfg.b,
        "h0": cfg.resolve_h0(sample.n),
        "kernel": cfg.family,
        "window": cfg.window,
        "n": sample.n,
    }
    if args.x is not None:
        pred = point_predict(sample, args.x, cfg, method)
        lines = ["x,prediction", f"{_fmt(args.x)},{_fmt(pred)}"]
        sidecar["x"] = args.x
        _emit(args, lines, sidecar)
        return 0
    k = args.eval_last
    if not (1 <= k <= sample.n - 1):
        raise CliError(f"--eval-last must be in 1..{sample.n - 1}, got {k}")
    lines = ["row,x,y,prediction"]
    errors = []
    for i in range(sample.n - k, sample.n):
        sub = sample.without_index(i)
        x_i = float(sample.xs[i])
        y_i = float(sample.ys[i])
        pred = point_predict(sub, x_i, cfg, method)
        errors.append(pred - y_i)
        lines.append(f"{i + 1},{_fmt(x_i)},{_fmt(y_i)},{_fmt(pred)}")
    errors = np.array(errors)
    sidecar["eval_last"] = k
    sidecar["bias"] = float(np.mean(errors))
    sidecar["mse"] = float(np.mean(errors**2))
    lines.append(f"# bias,{_fmt(sidecar['bias'])}")
    lines.append(f"# mse,{_fmt(sidecar['mse'])}")
    _emit(args, lines, sidecar)
    return 0


def _cmd_cv(args) -> int:
    sample = _load_sample(args)
    try:
        candidates = [float(tok) for tok in args.candidates.split(",") if tok.strip()]
    except ValueError:
        raise CliError(
            f"--candidates expects comma-separated numbers, got {args.candidates!r}"
        ) from None
    grid = _parse_grid(args.grid) if args.grid else None
    try:
        cfg = EstimatorConfig(
            b=candidates[0] if candidates else 1.0,
            h0=args.h0,
            family=args.kernel,
            grid=grid,
        )
        cv = CvConfig(
            candidates=candidates,
            method=_PREDICT_METHODS[args.method],
            m=args.m,
            window=_WINDOW_FLAGS[args.window],
        )
    except (ValueError, IndexError) as exc:
        raise CliError(str(exc)) from exc
    result = select_bandwidth(sample, args.x, cv, cfg)
    lines = ["b,err,feasible"]
    for b in cv.candidates:
        err = result.err_by_b[b]
        cell = "NA" if err is None else _fmt(err)
        lines.append(f"{_fmt(b)},{cell},{'no' if err is None else 'yes'}")
    sidecar = {
        "command": "cv",
        "data": args.data,
        "x": args.x,
        "method": args.method,
        "candidates": list(cv.candidates),
        "m": cv.m,
        "window": cv.window,
        "kernel": args.kernel,
        "best_b": result.best_b,
        "infeasible": sorted(result.infeasible),
        "n": sample.n,
    }
    lines.append(f"# best_b,{_fmt(result.best_b)}")
    _emit(args, lines, sidecar)
    return 0


def _cmd_bootstrap(args) -> int:
    sample = _load_sample(args)
    cfg = _build_config(args, sample.n)
    seed = _resolve_seed(args)
    if args.B < 1:
        raise CliError(f"--B must be at least 1, got {args.B}")
    summary = lmf_bootstrap(sample, args.x, args.y, args.B, cfg, seed)
    lines = ["replicate"]
    lines.extend(_fmt(v) for v in summary.replicates)
    lines.append(f"# variance,{_fmt(summary.variance)}")
    sidecar = {
        "command": "bootstrap",
        "data": args.data,
        "x": args.x,
        "y": args.y,
        "B": summary.B,
        "seed": summary.seed,
        "b": cfg.b,
        "h0": cfg.resolve_h0(sample.n),
        "kernel": cfg.family,
        "window": cfg.window,
        "variance": summary.variance,
        "n": sample.n,
    }
    _emit(args, lines, sidecar)
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIM_METHOD_ORDER = ("LC", "LLH", "LLM", "LL")


def _experiment_config_from_dict(doc: dict) -> ExperimentConfig:
    try:
        dgp = DgpSpec(**doc["dgp"])
        eval_points = tuple(
            EvalPoint(index=ep["index"], window=ep.get("window", "two_sided_exclude_target"))
            for ep in doc["eval_points"]
        )
        return ExperimentConfig(
            dgp=dgp,
            realizations=doc["realizations"],
            eval_points=eval_points,
            bandwidths=doc["bandwidths"],
            methods=tuple(doc.get("methods", _SIM_METHOD_ORDER)),
            quantile_levels=tuple(doc.get("quantile_levels", ())),
            kernel=doc.get("kernel", "gaussian"),
            grid_count=doc.get("grid_count", DEFAULT_GRID_COUNT),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid experiment config: {exc}") from exc


def _experiment_config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "dgp": {
            "n": cfg.dgp.n,
            "tau": cfg.dgp.tau,
            "error_kind": cfg.dgp.error_kind,
            "variance_kind": cfg.dgp.variance_kind,
            "seed": cfg.dgp.seed,
        },
        "realizations": cfg.realizations,
        "eval_points": [
            {"index": ep.index, "window": ep.window} for ep in cfg.eval_points
        ],
        "bandwidths": list(cfg.bandwidths),
        "methods": list(cfg.methods),
        "quantile_levels": list(cfg.quantile_levels),
        "kernel": cfg.kernel,
        "grid_count": cfg.grid_count,
    }


def _write_text(path, lines):
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_simulate(args) -> int:
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot open {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.config}: invalid JSON: {exc}") from exc
    cfg = _experiment_config_from_dict(doc)
    if args.seed is not None or os.environ.get(SEED_ENV_VAR):
        seed = _resolve_seed(args)
        cfg = replace(cfg, dgp=replace(cfg.dgp, seed=seed))
    os.makedirs(args.out, exist_ok=True)
    report = run_experiment(cfg)

    def cell(table, key):
        return _fmt(table[key]) if key in table else "NA"

    for ep in cfg.eval_points:
        idx = ep.index
        ks_lines = ["b,ks_lc,ks_llh,ks_llm"]
        pred_lines = [
            "b,bias_lc,mse_lc,bias_llh,mse_llh,bias_llm,mse_llm,bias_ll,mse_ll"
        ]
        for b in cfg.bandwidths:
            ks_lines.append(
                ",".join(
                    [_fmt(b)]
                    + [cell(report.ks_table, (idx, b, m)) for m in ("LC", "LLH", "LLM")]
                )
            )
            row = [_fmt(b)]
            for m in _SIM_METHOD_ORDER:
                key = (idx, b, m)
                if key in report.pred_table:
                    bias, mse = report.pred_table[key]
                    row.extend([_fmt(bias), _fmt(mse)])
                else:
                    row.extend(["NA", "NA"])
            pred_lines.append(",".join(row))
        _write_text(os.path.join(args.out, f"ks_point{idx}.csv"), ks_lines)
        _write_text(os.path.join(args.out, f"pred_point{idx}.csv"), pred_lines)

        if cfg.quantile_levels:
            q_lines = ["alpha,method,bandwidth,true,realization,estimate"]
            for a in cfg.quantile_levels:
                for m in ("LC", "LLH", "LLM"):
                    key = (idx, a, m)
                    if key not in report.quantile_table:
                        continue
                    qc = report.quantile_table[key]
                    for r, est in enumerate(qc.estimates):
                        q_lines.append(
                            f"{_fmt(a)},{m},{_fmt(qc.bandwidth)},"
                            f"{_fmt(qc.true_value)},{r},{_fmt(est)}"
                        )
            _write_text(os.path.join(args.out, f"quantiles_point{idx}.csv"), q_lines)

    echo = _experiment_config_to_dict(cfg)
    with open(os.path.join(args.out, "run_config.json"), "w") as fh:
        fh.write(json.dumps(echo, indent=2, sort_keys=True) + "\n")

    n_bad = len(report.infeasible)
    if n_bad:
        sys.stderr.write(f"warning: {n_bad} infeasible cells marked NA\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monollr",
        description="Monotone-corrected local linear conditional distributions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="fit a conditional CDF on a grid")
    _add_data_args(p_est)
    p_est.add_argument("--x", type=float, required=True, help="evaluation point")
    p_est.add_argument(
        "--method",
        choices=("lc", "llh", "llm", "ll-raw"),
        required=True,
        help="distribution estimator",
    )
    p_est.add_argument(
        "--algorithm",
        choices=("running-max", "clip-density"),
        default="running-max",
        help="monotone correction used by --method llm",
    )
    _add_fit_args(p_est)
    p_est.set_defaults(func=_cmd_estimate)

    p_pred = sub.add_parser("predict", help="point prediction of the response")
    _add_data_args(p_pred)
    p_pred.add_argument("--x", type=float, default=None, help="evaluation point")
    p_pred.add_argument(
        "--eval-last",
        type=int,
        default=None,
        help="predict each of the last K rows from the rest of the data",
    )
    p_pred.add_argument(
        "--method",
        choices=sorted(_PREDICT_METHODS),
        required=True,
        help="prediction method",
    )
    _add_fit_args(p_pred)
    p_pred.set_defaults(func=_cmd_predict)

    p_cv = sub.add_parser("cv", help="local delete-one bandwidth selection")
    _add_data_args(p_cv)
    p_cv.add_argument("--x", type=float, required=True, help="neighborhood center")
    p_cv.add_argument(
        "--method",
        choices=sorted(_PREDICT_METHODS),
        default="ll",
        help="prediction method scored by the criterion",
    )
    p_cv.add_argument(
        "--candidates", required=True, help="comma-separated bandwidths"
    )
    p_cv.add_argument("--m", type=int, default=None, help="neighborhood size")
    p_cv.add_argument("--h0", type=float, default=None, help="fixed h0 override")
    p_cv.add_argument("--kernel", choices=KERNEL_FAMILIES, default="gaussian")
    p_cv.add_argument(
        "--window", choices=sorted(_WINDOW_FLAGS), default="two-sided"
    )
    p_cv.add_argument("--grid", default=None, help="response grid as LO:HI:N")
    p_cv.add_argument("--out", default=None)
    p_cv.set_defaults(func=_cmd_cv)

    p_boot = sub.add_parser("bootstrap", help="bootstrap variance of the CDF fit")
    _add_data_args(p_boot)
    p_boot.add_argument("--x", type=float, required=True)
    p_boot.add_argument("--y", type=float, required=True)
    p_boot.add_argument("--B", type=int, required=True, help="replicate count")
    p_boot.add_argument("--seed", type=int, default=None)
    _add_fit_args(p_boot)
    p_boot.set_defaults(func=_cmd_bootstrap)

    p_sim = sub.add_parser("simulate", help="run a simulation experiment")
    p_sim.add_argument("--config", required=True, help="experiment JSON file")
    p_sim.add_argument("--seed", type=int, default=None, help="override DGP seed")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except EstimationError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
