import math

import numpy as np
import pytest

from roblaw import (
    ActivationKind,
    DotProductKernel,
    FeatureMap,
    HiddenWeights,
    InvalidArgument,
    UnsupportedActivation,
    coef_norm,
    eta_proxy,
    fit_features,
    fit_kernel,
    gen_dataset,
    poincare_lower_bound,
    proxies,
    sample_sphere,
    sobolev_analytic,
    sobolev_exact_linear,
    sobolev_monte_carlo,
)
from roblaw.fit import KernelModel, LinearModel, TwoLayerModel


def _relu_two_layer(d, k, seed):
    W = HiddenWeights(sample_sphere(d, k, seed).points)
    v = np.random.default_rng(seed + 1).normal(size=k)
    return TwoLayerModel(W=W, v=v, activation=ActivationKind.RELU)


def test_analytic_single_neuron():
    W = HiddenWeights(sample_sphere(10, 1, 0).points)
    m = TwoLayerModel(W=W, v=np.array([1.0]), activation=ActivationKind.RELU)
    assert sobolev_analytic(m).value == pytest.approx(math.sqrt(0.45), abs=1e-12)


def test_analytic_zero_output_weights():
    W = HiddenWeights(sample_sphere(6, 4, 1).points)
    m = TwoLayerModel(W=W, v=np.zeros(4), activation=ActivationKind.RELU)
    assert sobolev_analytic(m).value == 0.0


def test_analytic_orthonormal_pair():
    m = TwoLayerModel(
        W=HiddenWeights(np.eye(2)), v=np.array([1.0, 1.0]),
        activation=ActivationKind.RELU,
    )
    # diagonal terms 1/2 - 1/4 each, cross terms -phi(0)/d each
    ref = math.sqrt(2 * 0.25 + 2 * (-1 / (4 * math.pi)))
    assert sobolev_analytic(m).value == pytest.approx(ref, abs=1e-12)


def test_analytic_rejects_nonhomogeneous():
    W = HiddenWeights(sample_sphere(5, 2, 2).points)
    m = TwoLayerModel(W=W, v=np.ones(2), activation=ActivationKind.TANH)
    with pytest.raises(UnsupportedActivation):
        sobolev_analytic(m)


def test_analytic_scale_equivariance():
    m = _relu_two_layer(12, 7, 3)
    base = sobolev_analytic(m).value
    scaled = TwoLayerModel(W=m.W, v=3.5 * m.v, activation=m.activation)
    assert sobolev_analytic(scaled).value == pytest.approx(3.5 * base, rel=1e-12)


def test_exact_linear_values():
    e1 = LinearModel(w=np.eye(100)[0])
    assert sobolev_exact_linear(e1).value == pytest.approx(math.sqrt(0.99), abs=1e-12)
    zero = LinearModel(w=np.zeros(5))
    assert sobolev_exact_linear(zero).value == 0.0
    w2 = LinearModel(w=np.array([3.0, 4.0]))
    assert sobolev_exact_linear(w2).value == pytest.approx(5.0 / math.sqrt(2), rel=1e-12)


def test_monte_carlo_matches_exact_linear():
    m = LinearModel(w=np.random.default_rng(4).normal(size=20))
    exact = sobolev_exact_linear(m).value
    est = sobolev_monte_carlo(m, 20, 100000, 5)
    assert abs(est.value - exact) < 3 * max(est.std_error, 1e-12)


def test_monte_carlo_matches_analytic_two_layer():
    m = _relu_two_layer(30, 25, 6)
    ref = sobolev_analytic(m).value
    est = sobolev_monte_carlo(m, 30, 20000, 7)
    assert est.value == pytest.approx(ref, rel=0.05)
    assert est.method == "monte_carlo" and est.samples == 20000


def test_monte_carlo_stderr_shrinks_with_samples():
    m = _relu_two_layer(10, 6, 8)
    se1 = sobolev_monte_carlo(m, 10, 2000, 9).std_error
    se2 = sobolev_monte_carlo(m, 10, 8000, 9).std_error
    assert se2 < se1
    assert se1 / se2 == pytest.approx(2.0, rel=0.3)


def test_monte_carlo_constant_model_is_zero():
    data = gen_dataset(5, 8, 0.0, 10)
    model = KernelModel(
        kernel=DotProductKernel(name="gaussian", s=1.0),
        anchors=data.X, c=np.zeros(5),
    )
    assert sobolev_monte_carlo(model, 8, 1000, 11).value == 0.0


def test_monte_carlo_minimum_samples():
    with pytest.raises(InvalidArgument):
        sobolev_monte_carlo(LinearModel(w=np.ones(4)), 4, 50, 0)


def test_poincare_equality_for_linear():
    # (d-1) Var(x.w) = (d-1)|w|^2/d equals the squared seminorm exactly
    m = LinearModel(w=np.random.default_rng(12).normal(size=40))
    bound = poincare_lower_bound(m, 40, 200000, 13)
    exact_sq = sobolev_exact_linear(m).value ** 2
    assert bound == pytest.approx(exact_sq, rel=0.05)
    assert bound <= exact_sq * 1.05


def test_poincare_below_seminorm_two_layer():
    m = _relu_two_layer(15, 10, 14)
    bound = poincare_lower_bound(m, 15, 50000, 15)
    est = sobolev_monte_carlo(m, 15, 50000, 16)
    assert bound <= est.value**2 * 1.1


def test_eta_proxy_direct_sum():
    W = np.array([[1.0, 0.0], [0.0, 3.0]])
    m = TwoLayerModel(
        W=HiddenWeights(W, row_normalized=False), v=np.array([1.0, -2.0]),
        activation=ActivationKind.RELU,
    )
    assert eta_proxy(m) == pytest.approx(7.0)


def test_eta_proxy_chain_upper_bound():
    rng = np.random.default_rng(17)
    for _ in range(200):
        k, d = 6, 9
        W = HiddenWeights(sample_sphere(d, k, int(rng.integers(1 << 30))).points)
        v = rng.normal(size=k)
        m = TwoLayerModel(W=W, v=v, activation=ActivationKind.RELU)
        bound = math.sqrt(k) * np.linalg.norm(v) * np.linalg.norm(W.W, axis=1).max()
        assert eta_proxy(m) <= bound + 1e-12


def test_proxies_per_family():
    lin = LinearModel(w=np.array([0.6, 0.8]))
    assert proxies(lin).w_norm == pytest.approx(1.0)
    data = gen_dataset(8, 10, 0.1, 18)
    km = fit_kernel(DotProductKernel(name="arccos1"), data, 0.0)
    p = proxies(km)
    assert p.rkhs_norm is not None and p.rkhs_norm > 0
    W = HiddenWeights(sample_sphere(10, 5, 19).points)
    fm = fit_features(
        FeatureMap(kind="frozen_rf", weights=W, activation=ActivationKind.RELU),
        data, 0.01,
    )
    assert proxies(fm).eta is not None


def test_coef_norm_families():
    assert coef_norm(LinearModel(w=np.array([3.0, 4.0]))) == pytest.approx(5.0)
    m = _relu_two_layer(6, 3, 20)
    assert coef_norm(m) == pytest.approx(float(np.linalg.norm(m.v)))


def test_analytic_over_v_norm_band_at_proportional_width():
    # seminorm and output-weight norm are equivalent at k ~ d
    for seed in range(20):
        m = _relu_two_layer(40, 40, 100 + seed)
        ratio = sobolev_analytic(m).value / np.linalg.norm(m.v)
        assert 0.2 <= ratio <= 3.0
