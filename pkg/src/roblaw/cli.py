"""lawbench command-line interface.

Exit codes: 0 success, 2 invalid config/arguments, 3 I/O error,
4 numeric failure in a non-sweep command.
"""

import argparse
import json
import math
import sys

import numpy as np

from .activations import ActivationKind
from .analyze import analyze_descent, analyze_law, asymptotics
from .data import gen_dataset
from .errors import InvalidArgument, IoError, NumericFailure, RoblawError, SingularKernel
from .kernels import HiddenWeights
from .sobolev import sobolev_monte_carlo
from .spectral import c_sigma_cov, sym_eigs
from .sphere import sample_sphere
from .sweep import (
    CSV_COLUMNS,
    SweepConfig,
    TrialCell,
    preset,
    run_sweep,
    run_trial,
)

PRESETS = ("exp1", "exp2", "exp3", "exp1-mini", "exp2-mini", "exp3-mini")

_CONFIG_FIELDS = {
    "regime": str,
    "activation": str,
    "n_grid": "int_list",
    "d_grid": "int_list",
    "k_grid": "int_list",
    "lambda_grid": "float_list",
    "zeta_grid": "float_list",
    "datasets_per_cell": int,
    "weight_draws_per_dataset": int,
    "mc_samples": int,
    "base_seed": int,
    "output_path": str,
    "zero_signal": "bool",
}


def parse_config_file(path: str) -> dict:
    """Flat key=value config; '#' starts a comment; lists are
    comma-separated. Unknown keys are errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_FIELDS:
            raise InvalidArgument(f"{path}:{lineno}: unknown key {key!r}")
        kind = _CONFIG_FIELDS[key]
        if kind is str:
            out[key] = val
        elif kind is int:
            out[key] = int(val)
        elif kind == "bool":
            if val.lower() not in ("true", "false"):
                raise InvalidArgument(f"{path}:{lineno}: expected true/false")
            out[key] = val.lower() == "true"
        elif kind == "int_list":
            out[key] = tuple(int(v) for v in val.split(",") if v.strip())
        elif kind == "float_list":
            out[key] = tuple(float(v) for v in val.split(",") if v.strip())
    return out


def _json_print(obj):
    def default(x):
        if isinstance(x, float) and not math.isfinite(x):
            return str(x)
        raise TypeError

    print(json.dumps(obj, indent=2, default=default))


def cmd_gen_data(args):
    data = gen_dataset(args.n, args.d, args.zeta, args.seed)
    header = ",".join([f"x{i+1}" for i in range(args.d)] + ["y"])
    body = np.column_stack([data.X.points, data.y])
    try:
        np.savetxt(args.out, body, delimiter=",", header=header,
                   comments="", fmt="%.17g")
    except OSError as exc:
        raise IoError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {args.n} x {args.d + 1} values to {args.out}")


def cmd_eigs(args):
    W = HiddenWeights(sample_sphere(args.d, args.k, args.seed).points)
    s = sym_eigs(c_sigma_cov(W, ActivationKind(args.activation), args.d))
    _json_print({
        "activation": args.activation, "d": args.d, "k": args.k,
        "lambda_min": s.lambda_min, "lambda_max": s.lambda_max,
        "cond": s.cond,
    })


def _cell_from_args(args) -> TrialCell:
    return TrialCell(
        regime=args.regime, activation=ActivationKind(args.activation),
        n=args.n, d=args.d, k=args.k, lam=getattr(args, "lam", 0.0),
        zeta=args.zeta, dataset_seed=args.seed, weight_seed=args.seed + 1,
        mc_samples=args.mc_samples,
    )


def _record_json(rec) -> dict:
    out = {}
    for col, val in zip(CSV_COLUMNS, rec.csv_row()):
        out[col] = val
    return out


def cmd_fit(args):
    rec = run_trial(_cell_from_args(args))
    if rec.reason:
        raise NumericFailure(rec.reason)
    _json_print(_record_json(rec))


def cmd_sobolev(args):
    rec = run_trial(_cell_from_args(args))
    if rec.reason:
        raise NumericFailure(rec.reason)
    _json_print({
        "sobolev_mc": rec.sobolev_mc,
        "sobolev_mc_stderr": rec.sobolev_mc_stderr,
        "sobolev_analytic": rec.sobolev_analytic,
        "mc_samples": args.mc_samples,
    })


def cmd_sweep(args):
    if args.preset:
        cfg = preset(args.preset, base_seed=args.seed, output_path=args.out)
    elif args.config:
        fields = parse_config_file(args.config)
        if args.out:
            fields["output_path"] = args.out
        fields.setdefault("base_seed", args.seed)
        if "activation" in fields:
            fields["activation"] = ActivationKind(fields["activation"])
        try:
            cfg = SweepConfig(**fields)
        except TypeError as exc:
            raise InvalidArgument(f"bad config: {exc}") from exc
    else:
        raise InvalidArgument("sweep needs --preset or --config")
    path = run_sweep(cfg, workers=args.workers)
    print(f"wrote {path}")


def cmd_analyze_law(args):
    group_by = tuple(args.group_by.split(",")) if args.group_by else (
        "regime", "activation", "lambda")
    _json_print(analyze_law(args.csv, x_expr=args.x_expr, group_by=group_by))


def cmd_analyze_descent(args):
    _json_print(analyze_descent(args.csv, threshold_expr=args.threshold))


def cmd_asymptotics(args):
    _json_print(asymptotics(args.gamma, args.nlambda))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lawbench",
        description="Robustness-law benchmarks for two-layer networks "
                    "in RF/NTK regimes.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default=None):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=out_default)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("gen-data", help="write a generic dataset as CSV")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--zeta", type=float, default=0.0)
    common(sp, out_default="data.csv")
    sp.set_defaults(func=cmd_gen_data)

    sp = sub.add_parser("eigs", help="spectrum of the activation covariance matrix")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--activation", default="relu")
    common(sp)
    sp.set_defaults(func=cmd_eigs)

    def trial_args(sp):
        sp.add_argument("--regime", required=True)
        sp.add_argument("--activation", default="relu")
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--d", type=int, required=True)
        sp.add_argument("--k", type=int, default=0)
        sp.add_argument("--lambda", dest="lam", type=float, default=0.0)
        sp.add_argument("--zeta", type=float, default=0.0)
        sp.add_argument("--mc-samples", type=int, default=500)
        common(sp)

    sp = sub.add_parser("fit", help="run a single trial and print the record")
    trial_args(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("sobolev", help="seminorm estimates for a single trial")
    trial_args(sp)
    sp.set_defaults(func=cmd_sobolev)

    sp = sub.add_parser("sweep", help="run an experiment grid to CSV")
    sp.add_argument("--preset", choices=PRESETS)
    sp.add_argument("--config")
    common(sp, out_default="sweep.csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analyze-law", help="robustness-law regression per group")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--x-expr", default="sqrt_n", choices=("sqrt_n", "sqrt_n_over_k"))
    sp.add_argument("--group-by", default="")
    common(sp)
    sp.set_defaults(func=cmd_analyze_law)

    sp = sub.add_parser("analyze-descent", help="interpolation-threshold peaks")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--threshold", default="n_eq_k",
                    choices=("n_eq_k", "n_eq_d", "n_eq_kd"))
    common(sp)
    sp.set_defaults(func=cmd_analyze_descent)

    sp = sub.add_parser("asymptotics", help="ridge(less) reference limits")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--nlambda", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=cmd_asymptotics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericFailure, SingularKernel) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except RoblawError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
