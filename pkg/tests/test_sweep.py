import csv
import math
from pathlib import Path

import numpy as np
import pytest

from roblaw import ActivationKind, InvalidArgument, SweepConfig, TrialCell, gen_dataset
from roblaw.sweep import (
    CSV_COLUMNS,
    gen_test_set,
    iter_cells,
    preset,
    run_sweep,
    run_trial,
    splitmix64,
)


def small_config(tmp_path, **overrides):
    fields = dict(
        regime="rf_finite", activation=ActivationKind.RELU,
        n_grid=(12,), d_grid=(10,), k_grid=(8,), lambda_grid=(0.0, 1e-3),
        zeta_grid=(0.5,), datasets_per_cell=1, weight_draws_per_dataset=1,
        mc_samples=200, base_seed=7, output_path=str(tmp_path / "out.csv"),
    )
    fields.update(overrides)
    return SweepConfig(**fields)


def test_splitmix_deterministic_and_distinct():
    a = splitmix64(1, 0)
    assert a == splitmix64(1, 0)
    seen = {splitmix64(5, i) for i in range(1000)}
    assert len(seen) == 1000


def test_config_validation():
    with pytest.raises(InvalidArgument):
        SweepConfig(regime="bogus", activation=ActivationKind.RELU,
                    n_grid=(5,), d_grid=(4,), k_grid=(3,),
                    lambda_grid=(0.0,), zeta_grid=(0.5,))
    with pytest.raises(InvalidArgument):
        SweepConfig(regime="linear", activation=ActivationKind.RELU,
                    n_grid=(5,), d_grid=(4,), k_grid=(3,),
                    lambda_grid=(0.0,), zeta_grid=(1.5,))


def test_dataset_generation_contract():
    data = gen_dataset(50, 9, 0.0, 3)
    np.testing.assert_allclose(data.y, data.X.points @ data.w0, atol=1e-14)
    assert np.linalg.norm(data.w0) == pytest.approx(1.0)
    noisy = gen_dataset(10000, 9, 0.5, 4)
    resid = noisy.y - noisy.X.points @ noisy.w0
    assert np.var(resid) == pytest.approx(0.25, abs=0.015)
    assert noisy.bayes_error == pytest.approx(0.25)


def test_zero_signal_flag():
    data = gen_dataset(20, 6, 1.0, 5, zero_signal=True)
    assert np.all(data.w0 == 0)


def test_test_set_shares_signal_vector():
    data = gen_dataset(15, 8, 0.3, 6)
    t = gen_test_set(data)
    np.testing.assert_array_equal(t.w0, data.w0)
    assert t.n == 500 and t.seed != data.seed
    # fresh inputs
    assert t.X.points.shape != data.X.points.shape or np.abs(
        t.X.points[: data.n] - data.X.points
    ).max() > 1e-6


def test_iter_cells_counts_and_seed_sharing():
    cfg = small_config(Path("/tmp"), n_grid=(10, 20), lambda_grid=(0.0, 1e-3),
                       datasets_per_cell=2, weight_draws_per_dataset=3)
    cells = list(iter_cells(cfg))
    assert len(cells) == 2 * 2 * 2 * 3
    # dataset seeds repeat across lambda but not across dataset index
    by_key = {}
    for c in cells:
        by_key.setdefault((c.n, c.dataset_seed), set()).add(c.lam)
    assert all(len(lams) == 2 for lams in by_key.values())


def test_run_trial_populates_metrics():
    cell = TrialCell(regime="rf_finite", activation=ActivationKind.RELU,
                     n=8, d=12, k=20, lam=0.0, zeta=0.4,
                     dataset_seed=11, weight_seed=12, mc_samples=200)
    rec = run_trial(cell)
    assert rec.reason == ""
    assert rec.train_mse < 1e-10  # interpolation below width
    assert math.isfinite(rec.test_mse)
    assert rec.sobolev_mc > 0 and rec.sobolev_analytic > 0
    assert rec.sobolev_mc == pytest.approx(rec.sobolev_analytic, rel=0.25)
    assert rec.eta > 0 and math.isfinite(rec.gram_cond)
    assert math.isnan(rec.rkhs_norm)


def test_run_trial_failure_is_tagged_not_raised():
    # tanh has no infinite-width kernel profile; the trial must come back
    # as a tagged row
    cell = TrialCell(regime="rf_infinite", activation=ActivationKind.TANH,
                     n=5, d=6, k=0, lam=0.0, zeta=0.1,
                     dataset_seed=1, weight_seed=2, mc_samples=200)
    rec = run_trial(cell)
    assert rec.reason != ""
    assert math.isnan(rec.train_mse)


def test_run_trial_linear_and_infinite_regimes():
    lin = run_trial(TrialCell(regime="linear", activation=ActivationKind.RELU,
                              n=10, d=20, k=0, lam=0.0, zeta=0.2,
                              dataset_seed=3, weight_seed=4, mc_samples=200))
    assert lin.reason == "" and lin.train_mse < 1e-10
    inf = run_trial(TrialCell(regime="ntk_infinite", activation=ActivationKind.RELU,
                              n=10, d=20, k=0, lam=0.0, zeta=0.2,
                              dataset_seed=3, weight_seed=4, mc_samples=200))
    assert inf.reason == "" and inf.train_mse < 1e-10
    assert inf.rkhs_norm > 0


def test_sweep_csv_schema_and_determinism(tmp_path):
    cfg = small_config(tmp_path)
    path = run_sweep(cfg)
    with open(path, encoding="utf-8") as fh:
        first = fh.read()
    rows = list(csv.reader(first.splitlines()))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 1 + 2  # two lambda values, one rep each
    path2 = run_sweep(small_config(tmp_path))
    with open(path2, encoding="utf-8") as fh:
        assert fh.read() == first


def test_sweep_workers_same_output(tmp_path):
    cfg = small_config(tmp_path, weight_draws_per_dataset=2)
    serial = run_sweep(cfg)
    with open(serial, encoding="utf-8") as fh:
        a = fh.read()
    par = run_sweep(small_config(tmp_path, weight_draws_per_dataset=2), workers=4)
    with open(par, encoding="utf-8") as fh:
        assert fh.read() == a


def test_empty_grid_writes_header_only(tmp_path):
    cfg = small_config(tmp_path, n_grid=())
    path = run_sweep(cfg)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 1


def test_presets_shapes():
    e1 = preset("exp1")
    assert len(list(iter_cells(e1))) == 31 * 6 * 4 * 10 * 15 == 111600
    assert e1.d_grid == (50,) and e1.k_grid == (40,)
    e2 = preset("exp2")
    assert e2.regime == "rf_finite" and e2.d_grid == (300,)
    e3 = preset("exp3")
    assert e3.regime == "rf_infinite" and e3.lambda_grid == (0.0,)
    for name in ("exp1-mini", "exp2-mini", "exp3-mini"):
        cfg = preset(name)
        assert cfg.datasets_per_cell <= 5 and cfg.weight_draws_per_dataset <= 5
    with pytest.raises(InvalidArgument):
        preset("exp9")
