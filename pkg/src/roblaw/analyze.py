"""Post-hoc analysis of sweep CSVs: the robustness-law regression
(seminorm against excess-accuracy times a sample-size factor) and
multiple-descent peak detection at interpolation thresholds."""

import csv
import math

import numpy as np

from .errors import InvalidArgument, IoError
from .fit import mse_limit, ridgeless_norm_limit
from .spectral import mp_integral

X_EXPRS = ("sqrt_n", "sqrt_n_over_k")
THRESHOLD_EXPRS = ("n_eq_k", "n_eq_d", "n_eq_kd")


def read_sweep_csv(path: str) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _xfactor(row: dict, x_expr: str) -> float:
    n = float(row["n"])
    if x_expr == "sqrt_n":
        return math.sqrt(n)
    if x_expr == "sqrt_n_over_k":
        k = float(row["k"])
        if k <= 0:
            return math.nan
        return math.sqrt(n / k)
    raise InvalidArgument(f"unknown x_expr {x_expr}")


def analyze_law(
    csv_path: str,
    x_expr: str = "sqrt_n",
    group_by: tuple = ("regime", "activation", "lambda"),
) -> dict:
    """Per group: least-squares slope/intercept and Pearson correlation of
    sobolev_mc against (zeta^2 - train_mse) * x_expr. Groups with fewer
    than 3 finite points are skipped."""
    if x_expr not in X_EXPRS:
        raise InvalidArgument(f"x_expr must be one of {X_EXPRS}")
    rows = read_sweep_csv(csv_path)
    groups: dict[str, list] = {}
    for row in rows:
        key = "|".join(f"{g}={row[g]}" for g in group_by)
        x = (float(row["zeta"]) ** 2 - float(row["train_mse"])) * _xfactor(row, x_expr)
        y = float(row["sobolev_mc"])
        if math.isfinite(x) and math.isfinite(y):
            groups.setdefault(key, []).append((x, y))
    out = {"x_expr": x_expr, "group_by": list(group_by), "groups": {}, "skipped": []}
    for key, pts in sorted(groups.items()):
        if len(pts) < 3:
            out["skipped"].append(key)
            continue
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        slope, intercept = np.polyfit(x, y, 1)
        sx, sy = np.std(x), np.std(y)
        corr = float(np.corrcoef(x, y)[0, 1]) if sx > 0 and sy > 0 else 0.0
        if sx == 0:
            slope = 0.0
        out["groups"][key] = {
            "slope": float(slope),
            "intercept": float(intercept),
            "correlation": corr,
            "count": len(pts),
        }
    return out


def _ratio_coord(row: dict, threshold_expr: str) -> float:
    n, d, k = float(row["n"]), float(row["d"]), float(row["k"])
    if threshold_expr == "n_eq_k":
        return n / k if k > 0 else math.nan
    if threshold_expr == "n_eq_d":
        return n / d
    if threshold_expr == "n_eq_kd":
        return n / (k * d) if k > 0 else math.nan
    raise InvalidArgument(f"unknown threshold_expr {threshold_expr}")


def analyze_descent(csv_path: str, threshold_expr: str = "n_eq_k") -> dict:
    """Median seminorm at the grid point nearest the interpolation
    threshold versus the medians at half and twice the threshold
    coordinate; peak ratio is the smaller of the two center/flank ratios.
    Reported separately per ridge value."""
    if threshold_expr not in THRESHOLD_EXPRS:
        raise InvalidArgument(f"threshold_expr must be one of {THRESHOLD_EXPRS}")
    rows = read_sweep_csv(csv_path)
    by_lambda: dict[str, dict[float, list]] = {}
    for row in rows:
        r = _ratio_coord(row, threshold_expr)
        y = float(row["sobolev_mc"])
        if not (math.isfinite(r) and math.isfinite(y)):
            continue
        by_lambda.setdefault(row["lambda"], {}).setdefault(r, []).append(y)
    if not by_lambda:
        raise InvalidArgument("no usable rows in the CSV")
    out = {"threshold_expr": threshold_expr, "per_lambda": {}}
    for lam, cells in sorted(by_lambda.items(), key=lambda kv: float(kv[0])):
        ratios = sorted(cells)
        if ratios[0] > 1.0 or ratios[-1] < 1.0:
            raise InvalidArgument(
                f"threshold not inside the swept grid (coords {ratios[0]:.3g}"
                f"..{ratios[-1]:.3g})"
            )
        def nearest(target):
            return min(ratios, key=lambda r: abs(math.log(r / target)))

        r_c, r_lo, r_hi = nearest(1.0), nearest(0.5), nearest(2.0)
        med = {r: float(np.median(cells[r])) for r in (r_c, r_lo, r_hi)}
        peak = min(
            med[r_c] / med[r_lo] if med[r_lo] > 0 else math.inf,
            med[r_c] / med[r_hi] if med[r_hi] > 0 else math.inf,
        )
        out["per_lambda"][lam] = {
            "center_coord": r_c,
            "flank_coords": [r_lo, r_hi],
            "center_median": med[r_c],
            "flank_medians": [med[r_lo], med[r_hi]],
            "peak_ratio": peak,
        }
    return out


def asymptotics(gamma: float, nlambda: float = 0.0) -> dict:
    """Reference limits for the ridge(less) norm and training error, with
    the matching Marchenko-Pastur resolvent integral."""
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    if nlambda < 0:
        raise InvalidArgument("nlambda must be nonnegative")
    if nlambda == 0:
        norm = ridgeless_norm_limit(gamma)
        mse = mse_limit(gamma, "ridgeless")
    else:
        norm = mp_integral(gamma, nlambda, "norm")
        mse = mp_integral(gamma, nlambda, "mse")
    return {
        "gamma": gamma,
        "nlambda": nlambda,
        "norm_limit": norm,
        "mse_limit": mse,
        "mp_norm_integral": mp_integral(gamma, nlambda, "norm"),
        "diverges": not math.isfinite(norm),
    }
