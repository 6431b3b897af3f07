"""Reproducible experiment sweeps: grid configs, per-trial execution, and
deterministic CSV output.

Seeding: per-trial seeds derive from (base_seed, flattened grid index) via
splitmix64, so reruns of the same config are byte-identical and any cell
can be recomputed in isolation. Datasets are shared across weight draws
and ridge values within a cell, matching the experimental protocol.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .activations import HOMOGENEITY, ActivationKind, phi_profile
from .data import Dataset, gen_dataset
from .errors import InvalidArgument, IoError, RoblawError
from .fit import (
    FeatureModel,
    KernelModel,
    LinearModel,
    effective_lambda,
    fit_features,
    fit_kernel,
    fit_linear_ridge,
    test_mse,
    train_mse,
)
from .kernels import (
    DotProductKernel,
    FeatureMap,
    HiddenWeights,
    empirical_gram,
    gram_dot,
)
from .sobolev import coef_norm, eta_proxy, sobolev_analytic, sobolev_monte_carlo
from .spectral import c_sigma_cov, sym_eigs
from .sphere import sample_sphere

REGIMES = ("linear", "rf_finite", "ntk_finite", "rf_infinite", "ntk_infinite")

#: exact CSV column order; schema changes are breaking
CSV_COLUMNS = [
    "regime", "activation", "n", "d", "k", "lambda", "zeta",
    "dataset_seed", "weight_seed", "train_mse", "test_mse",
    "sobolev_mc", "sobolev_mc_stderr", "sobolev_analytic", "coef_norm",
    "eta", "rkhs_norm", "lambda_min_C", "lambda_max_C", "gram_cond",
    "solver_fallback", "reason",
]

TEST_SET_SIZE = 500
TEST_SEED_OFFSET = 77003


def splitmix64(seed: int, index: int) -> int:
    """Stateless seed derivation: one splitmix64 step on seed + index."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return (z ^ (z >> 31)) & 0x7FFFFFFFFFFFFFFF


@dataclass(frozen=True)
class SweepConfig:
    regime: str
    activation: ActivationKind
    n_grid: tuple
    d_grid: tuple
    k_grid: tuple
    lambda_grid: tuple
    zeta_grid: tuple
    datasets_per_cell: int = 1
    weight_draws_per_dataset: int = 1
    mc_samples: int = 500
    base_seed: int = 0
    output_path: str = "sweep.csv"
    zero_signal: bool = False

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise InvalidArgument(f"unknown regime {self.regime}")
        if any(z < 0 or z > 1 for z in self.zeta_grid):
            raise InvalidArgument("zeta values must lie in [0, 1]")
        if any(l < 0 for l in self.lambda_grid):
            raise InvalidArgument("lambda values must be nonnegative")
        if self.datasets_per_cell < 1 or self.weight_draws_per_dataset < 1:
            raise InvalidArgument("repetition counts must be >= 1")


@dataclass(frozen=True)
class TrialCell:
    """One fully-specified trial: a grid point plus its derived seeds."""

    regime: str
    activation: ActivationKind
    n: int
    d: int
    k: int
    lam: float
    zeta: float
    dataset_seed: int
    weight_seed: int
    mc_samples: int = 500
    zero_signal: bool = False

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise InvalidArgument(f"unknown regime {self.regime}")


@dataclass
class TrialRecord:
    regime: str
    activation: str
    n: int
    d: int
    k: int
    lam: float
    zeta: float
    dataset_seed: int
    weight_seed: int
    train_mse: float = math.nan
    test_mse: float = math.nan
    sobolev_mc: float = math.nan
    sobolev_mc_stderr: float = math.nan
    sobolev_analytic: float = math.nan
    coef_norm: float = math.nan
    eta: float = math.nan
    rkhs_norm: float = math.nan
    lambda_min_C: float = math.nan
    lambda_max_C: float = math.nan
    gram_cond: float = math.nan
    solver_fallback: bool = False
    reason: str = ""

    def csv_row(self) -> list:
        def num(x):
            return "%.17g" % x

        return [
            self.regime, self.activation, str(self.n), str(self.d),
            str(self.k), num(self.lam), num(self.zeta),
            str(self.dataset_seed), str(self.weight_seed),
            num(self.train_mse), num(self.test_mse), num(self.sobolev_mc),
            num(self.sobolev_mc_stderr), num(self.sobolev_analytic),
            num(self.coef_norm), num(self.eta), num(self.rkhs_norm),
            num(self.lambda_min_C), num(self.lambda_max_C),
            num(self.gram_cond), "true" if self.solver_fallback else "false",
            self.reason.replace(",", ";"),
        ]


def gen_test_set(data: Dataset, size: int = TEST_SET_SIZE) -> Dataset:
    """Fresh inputs and noise under the same signal vector as `data`."""
    seed = data.seed + TEST_SEED_OFFSET
    X = sample_sphere(data.d, size, seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(2,)))
    y = X.points @ data.w0 + data.zeta * rng.standard_normal(size)
    return Dataset(X=X, y=y, w0=data.w0, zeta=data.zeta, seed=seed)


def _fit_for_cell(cell: TrialCell, data: Dataset):
    kind = ActivationKind(cell.activation)
    if cell.regime == "linear":
        return fit_linear_ridge(data, cell.lam)
    if cell.regime in ("rf_finite", "ntk_finite"):
        W = HiddenWeights(sample_sphere(cell.d, cell.k, cell.weight_seed).points)
        if cell.regime == "rf_finite":
            fmap = FeatureMap(kind="frozen_rf", weights=W, activation=kind)
            lam_eff = effective_lambda(cell.lam, "rf_scaled", k=cell.k, d=cell.d)
        else:
            fmap = FeatureMap(kind="ntk", weights=W, activation=kind)
            lam_eff = cell.lam
        return fit_features(fmap, data, lam_eff)
    name = "rf_infinite" if cell.regime == "rf_infinite" else "ntk_infinite"
    kernel = DotProductKernel(name=name, activation=kind)
    return fit_kernel(kernel, data, cell.lam, "plain")


def _spectra_for_cell(cell: TrialCell, data: Dataset, model, rec: TrialRecord):
    kind = ActivationKind(cell.activation)
    if isinstance(model, LinearModel):
        X = data.X.points
        G = X @ X.T if data.n <= data.d else X.T @ X
        s = sym_eigs(G)
        rec.lambda_min_C, rec.lambda_max_C = s.lambda_min, s.lambda_max
        rec.gram_cond = s.cond
        return
    if isinstance(model, KernelModel):
        s = sym_eigs(gram_dot(model.kernel, data.X, data.X))
        rec.lambda_min_C, rec.lambda_max_C = s.lambda_min, s.lambda_max
        rec.gram_cond = s.cond
        return
    # finite-width feature models
    fmap = model.map
    W = fmap.weights
    if fmap.kind == "frozen_rf":
        if HOMOGENEITY.get(kind) == 1.0:
            s = sym_eigs(c_sigma_cov(W, kind, cell.d))
            rec.lambda_min_C, rec.lambda_max_C = s.lambda_min, s.lambda_max
    else:
        if HOMOGENEITY.get(kind) == 1.0:
            T = np.clip(W.W @ W.W.T, -1.0, 1.0)
            C = np.asarray(phi_profile(kind, "derivative", T)) / W.k
            s = sym_eigs((C + C.T) / 2)
            rec.lambda_min_C, rec.lambda_max_C = s.lambda_min, s.lambda_max
    if data.n <= fmap.out_dim:
        s = sym_eigs(empirical_gram(fmap, data.X))
    else:
        from .kernels import features

        Z = features(fmap, data.X.points)
        s = sym_eigs(Z.T @ Z)
    rec.gram_cond = s.cond


def run_trial(cell: TrialCell) -> TrialRecord:
    """Execute one trial; failures come back as tagged rows, never raise."""
    rec = TrialRecord(
        regime=cell.regime, activation=ActivationKind(cell.activation).value,
        n=cell.n, d=cell.d, k=cell.k, lam=cell.lam, zeta=cell.zeta,
        dataset_seed=cell.dataset_seed, weight_seed=cell.weight_seed,
    )
    try:
        data = gen_dataset(cell.n, cell.d, cell.zeta, cell.dataset_seed,
                           zero_signal=cell.zero_signal)
        model = _fit_for_cell(cell, data)
        rec.solver_fallback = bool(model.meta.get("fallback", False))
        rec.train_mse = train_mse(model, data)
        rec.test_mse = test_mse(model, gen_test_set(data))
        est = sobolev_monte_carlo(
            model, cell.d, cell.mc_samples, splitmix64(cell.weight_seed, 3)
        )
        rec.sobolev_mc, rec.sobolev_mc_stderr = est.value, est.std_error
        rec.coef_norm = coef_norm(model)
        kind = ActivationKind(cell.activation)
        if isinstance(model, FeatureModel) and model.map.kind == "frozen_rf":
            if HOMOGENEITY.get(kind) == 1.0:
                rec.sobolev_analytic = sobolev_analytic(model).value
            rec.eta = eta_proxy(model)
        elif isinstance(model, LinearModel):
            w = np.asarray(model.w)
            rec.sobolev_analytic = float(
                np.linalg.norm(w) * math.sqrt(1 - 1 / cell.d)
            )
        if isinstance(model, KernelModel):
            from .fit import rkhs_norm

            rec.rkhs_norm = rkhs_norm(model)
        _spectra_for_cell(cell, data, model, rec)
    except RoblawError as exc:
        rec.reason = f"{type(exc).__name__}: {exc}"
    except np.linalg.LinAlgError as exc:
        rec.reason = f"LinAlgError: {exc}"
    return rec


def iter_cells(config: SweepConfig):
    """Cells in deterministic cell-major order (n, d, k, lambda, zeta,
    dataset, weight draw). Dataset seeds do not depend on lambda or the
    weight draw, so those loops reuse data."""
    data_axes = (
        len(config.n_grid), len(config.d_grid), len(config.k_grid),
        len(config.zeta_grid), config.datasets_per_cell,
    )
    for i_n, n in enumerate(config.n_grid):
        for i_d, d in enumerate(config.d_grid):
            for i_k, k in enumerate(config.k_grid):
                for lam in config.lambda_grid:
                    for i_z, zeta in enumerate(config.zeta_grid):
                        for i_ds in range(config.datasets_per_cell):
                            flat = int(np.ravel_multi_index(
                                (i_n, i_d, i_k, i_z, i_ds), data_axes
                            ))
                            ds_seed = splitmix64(config.base_seed, flat)
                            for i_w in range(config.weight_draws_per_dataset):
                                yield TrialCell(
                                    regime=config.regime,
                                    activation=config.activation,
                                    n=n, d=d, k=k, lam=lam, zeta=zeta,
                                    dataset_seed=ds_seed,
                                    weight_seed=splitmix64(ds_seed, i_w),
                                    mc_samples=config.mc_samples,
                                    zero_signal=config.zero_signal,
                                )


def run_sweep(config: SweepConfig, workers: int = 1) -> str:
    """Run the full grid and write the CSV; returns the output path."""
    cells = list(iter_cells(config))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_trial, cells))
    else:
        records = [run_trial(c) for c in cells]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())
    try:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise IoError(f"cannot write {config.output_path}: {exc}") from exc
    return config.output_path


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _frange(start, stop, step):
    out, v = [], start
    while v <= stop + 1e-12:
        out.append(round(v, 10))
        v += step
    return tuple(out)


_FULL_LAMBDAS = (0.0, 1e-5, 1e-4, 1e-3)
_FULL_ZETAS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def preset(name: str, base_seed: int = 0, output_path: str | None = None) -> SweepConfig:
    """Named experiment grids; the -mini variants are desk-scale versions
    with ~1/10 of the grid density and at most 5 repetitions per cell."""
    common = dict(activation=ActivationKind.RELU, base_seed=base_seed)
    if name == "exp1":
        cfg = SweepConfig(
            regime="ntk_finite", n_grid=tuple(range(20, 3021, 100)),
            d_grid=(50,), k_grid=(40,), lambda_grid=_FULL_LAMBDAS,
            zeta_grid=_FULL_ZETAS, datasets_per_cell=10,
            weight_draws_per_dataset=15, **common,
        )
    elif name == "exp1-mini":
        cfg = SweepConfig(
            regime="ntk_finite", n_grid=(20, 1020, 2020, 3020),
            d_grid=(50,), k_grid=(40,), lambda_grid=(0.0, 1e-3),
            zeta_grid=(0.0, 0.5, 1.0), datasets_per_cell=3,
            weight_draws_per_dataset=2, **common,
        )
    elif name == "exp2":
        cfg = SweepConfig(
            regime="rf_finite", n_grid=tuple(range(200, 1001, 100)),
            d_grid=(300,), k_grid=tuple(range(100, 1001, 50)),
            lambda_grid=_FULL_LAMBDAS, zeta_grid=_FULL_ZETAS,
            datasets_per_cell=10, weight_draws_per_dataset=15, **common,
        )
    elif name == "exp2-mini":
        cfg = SweepConfig(
            regime="rf_finite", n_grid=(200, 400, 800),
            d_grid=(300,), k_grid=(400,), lambda_grid=(0.0, 1e-3),
            zeta_grid=(1.0,), datasets_per_cell=3,
            weight_draws_per_dataset=3, **common,
        )
    elif name == "exp3":
        cfg = SweepConfig(
            regime="rf_infinite", n_grid=tuple(range(100, 1001, 100)),
            d_grid=(500,), k_grid=(0,), lambda_grid=(0.0,),
            zeta_grid=_FULL_ZETAS, datasets_per_cell=10,
            weight_draws_per_dataset=1, **common,
        )
    elif name == "exp3-mini":
        cfg = SweepConfig(
            regime="rf_infinite", n_grid=(100, 400, 700, 1000),
            d_grid=(500,), k_grid=(0,), lambda_grid=(0.0,),
            zeta_grid=(0.2, 0.6, 1.0), datasets_per_cell=3,
            weight_draws_per_dataset=1, **common,
        )
    else:
        raise InvalidArgument(f"unknown preset {name}")
    if output_path is not None:
        cfg = replace(cfg, output_path=output_path)
    return cfg
