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
    cross_gram,
    empirical_gram,
    features,
    fit_kernel,
    fit_features,
    gen_dataset,
    gram_dot,
    kernel_profile,
    kernel_profile_deriv,
    model_gradient,
    ntk_features,
    rf_features,
    sample_sphere,
)
from roblaw.fit import KernelModel, LinearModel, TwoLayerModel


ALL_KERNELS = [
    DotProductKernel(name="linear"),
    DotProductKernel(name="polynomial", c=0.5, p=3),
    DotProductKernel(name="gaussian", s=0.8),
    DotProductKernel(name="laplace", s=1.2),
    DotProductKernel(name="exp_type", s=1.0, beta=1.5),
    DotProductKernel(name="arccos0"),
    DotProductKernel(name="arccos1"),
    DotProductKernel(name="rf_infinite", activation=ActivationKind.RELU),
    DotProductKernel(name="ntk_infinite", activation=ActivationKind.RELU),
]


def test_profile_values_at_alignment():
    assert kernel_profile(DotProductKernel(name="linear"), 1.0) == 1.0
    assert kernel_profile(DotProductKernel(name="gaussian", s=0.7), 1.0) == 1.0
    assert kernel_profile(DotProductKernel(name="arccos0"), 1.0) == pytest.approx(1.0)
    assert kernel_profile(DotProductKernel(name="arccos1"), 1.0) == pytest.approx(1.0)
    assert kernel_profile(DotProductKernel(name="arccos1"), -1.0) == pytest.approx(0.0)


def test_arc_cosine_closed_forms():
    for t in (-0.9, -0.2, 0.3, 0.99):
        assert kernel_profile(DotProductKernel(name="arccos0"), t) == pytest.approx(
            math.acos(-t) / math.pi, rel=1e-12
        )
        assert kernel_profile(DotProductKernel(name="arccos1"), t) == pytest.approx(
            (t * math.acos(-t) + math.sqrt(1 - t * t)) / math.pi, rel=1e-12
        )


def test_infinite_width_profiles_match_arccos():
    # ReLU random-features kernel is the order-1 arc-cosine profile;
    # the width-limit tangent kernel is t * order-0 profile
    rf = DotProductKernel(name="rf_infinite", activation=ActivationKind.RELU)
    ntk = DotProductKernel(name="ntk_infinite", activation=ActivationKind.RELU)
    for t in (-0.8, 0.0, 0.5, 1.0):
        assert kernel_profile(rf, t) == pytest.approx(
            (t * math.acos(-t) + math.sqrt(1 - t * t)) / math.pi, abs=1e-12
        )
        assert kernel_profile(ntk, t) == pytest.approx(
            t * math.acos(-t) / math.pi, abs=1e-12
        )


def test_infinite_kernels_reject_nonhomogeneous_activation():
    with pytest.raises(UnsupportedActivation):
        DotProductKernel(name="rf_infinite", activation=ActivationKind.TANH)


def test_profile_deriv_matches_finite_difference():
    h = 1e-6
    for kernel in ALL_KERNELS:
        for t in (-0.7, -0.1, 0.4, 0.9):
            fd = (kernel_profile(kernel, t + h) - kernel_profile(kernel, t - h)) / (2 * h)
            assert kernel_profile_deriv(kernel, t) == pytest.approx(
                fd, rel=1e-4, abs=1e-6
            ), kernel.name


def test_arccos0_deriv_diverges_at_endpoints():
    assert kernel_profile_deriv(DotProductKernel(name="arccos0"), 1.0) == math.inf


def test_gram_symmetric_psd():
    X = sample_sphere(9, 40, 0)
    for kernel in ALL_KERNELS:
        G = gram_dot(kernel, X, X)
        np.testing.assert_allclose(G, G.T, atol=1e-14)
        if kernel.name != "linear":
            evals = np.linalg.eigvalsh(G)
            assert evals.min() > -1e-8, kernel.name


def test_rf_features_scaling():
    W = HiddenWeights(sample_sphere(6, 11, 1).points)
    fmap = FeatureMap(kind="frozen_rf", weights=W, activation=ActivationKind.RELU)
    x = sample_sphere(6, 1, 2).points[0]
    z = rf_features(fmap, x)
    assert z.shape == (11,)
    np.testing.assert_allclose(
        z, np.maximum(W.W @ x, 0.0) / math.sqrt(11), atol=1e-14
    )


def test_ntk_features_block_structure():
    W = HiddenWeights(sample_sphere(4, 3, 1).points)
    fmap = FeatureMap(kind="ntk", weights=W, activation=ActivationKind.RELU)
    x = sample_sphere(4, 1, 2).points[0]
    z = ntk_features(fmap, x)
    assert z.shape == (12,)
    s = (W.W @ x > 0).astype(float)
    ref = np.concatenate([s[j] * x for j in range(3)]) / math.sqrt(3)
    np.testing.assert_allclose(z, ref, atol=1e-14)


def test_empirical_gram_matches_materialized_features():
    X = sample_sphere(5, 20, 3)
    W = HiddenWeights(sample_sphere(5, 7, 4).points)
    for kind in ("frozen_rf", "ntk"):
        fmap = FeatureMap(kind=kind, weights=W, activation=ActivationKind.RELU)
        Z = features(fmap, X.points)
        np.testing.assert_allclose(empirical_gram(fmap, X), Z @ Z.T, atol=1e-12)


def test_cross_gram_consistency():
    A = sample_sphere(5, 8, 5)
    B = sample_sphere(5, 13, 6)
    W = HiddenWeights(sample_sphere(5, 6, 7).points)
    fmap = FeatureMap(kind="ntk", weights=W, activation=ActivationKind.RELU)
    ZA, ZB = features(fmap, A.points), features(fmap, B.points)
    np.testing.assert_allclose(cross_gram(fmap, A, B), ZA @ ZB.T, atol=1e-12)


def _numeric_gradient(predict, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (predict(x + e) - predict(x - e)) / (2 * h)
    return g


def test_model_gradient_matches_finite_differences():
    d = 6
    rng = np.random.default_rng(11)
    x = sample_sphere(d, 1, 12).points[0]
    W = HiddenWeights(sample_sphere(d, 5, 13).points)

    two_layer = TwoLayerModel(W=W, v=rng.normal(size=5), activation=ActivationKind.RELU)
    linear = LinearModel(w=rng.normal(size=d))
    data = gen_dataset(15, d, 0.2, 14)
    kern = fit_kernel(DotProductKernel(name="gaussian", s=1.1), data, 1e-6)
    rf = fit_features(
        FeatureMap(kind="frozen_rf", weights=W, activation=ActivationKind.RELU),
        data, 1e-6,
    )
    ntk = fit_features(
        FeatureMap(kind="ntk", weights=W, activation=ActivationKind.RELU), data, 1e-6
    )
    for model in (two_layer, linear, kern, rf, ntk):
        num = _numeric_gradient(lambda p: float(np.atleast_1d(model.predict(p))[0]), x.copy())
        np.testing.assert_allclose(
            model_gradient(model, x), num, rtol=1e-4, atol=1e-6
        )


def test_model_gradient_batched_matches_single():
    d = 5
    X = sample_sphere(d, 4, 1).points
    W = HiddenWeights(sample_sphere(d, 3, 2).points)
    model = TwoLayerModel(W=W, v=np.array([1.0, -2.0, 0.5]), activation=ActivationKind.ABS)
    G = model_gradient(model, X)
    for i in range(4):
        np.testing.assert_allclose(G[i], model_gradient(model, X[i]), atol=1e-14)


def test_gram_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        gram_dot(DotProductKernel(name="linear"), sample_sphere(4, 3, 0), sample_sphere(5, 3, 0))
