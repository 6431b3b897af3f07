"""Tangential-gradient (Sobolev) seminorm of fitted models: closed form
for two-layer networks with positively homogeneous activations, a
Monte-Carlo estimator for everything else, the Poincare lower bound, and
cheap norm proxies."""

import math
from dataclasses import dataclass

import numpy as np

from .activations import HOMOGENEITY, ActivationKind
from .errors import InvalidArgument, NumericFailure, UnsupportedActivation
from .fit import FeatureModel, KernelModel, LinearModel, TwoLayerModel
from .kernels import model_gradient
from .sphere import sample_sphere
from .spectral import c_sigma_sobolev


@dataclass(frozen=True)
class SobolevEstimate:
    value: float
    method: str  # "analytic" | "exact" | "monte_carlo"
    samples: int = 0
    std_error: float = 0.0


def _two_layer_view(model):
    """(W, v, kind) for models that are secretly two-layer networks."""
    if isinstance(model, TwoLayerModel):
        return model.W, model.v, model.activation
    if isinstance(model, FeatureModel) and model.map.kind == "frozen_rf":
        k = model.map.weights.k
        return model.map.weights, model.a / math.sqrt(k), model.map.activation
    return None


def sobolev_analytic(model) -> SobolevEstimate:
    """sqrt(v^T C v) with C the kappa-tilde matrix; valid for two-layer
    networks with order-1 positively homogeneous activations."""
    view = _two_layer_view(model)
    if view is None:
        raise InvalidArgument("analytic seminorm needs a two-layer model")
    W, v, kind = view
    if HOMOGENEITY.get(ActivationKind(kind)) != 1.0:
        raise UnsupportedActivation(f"no closed form for {kind}")
    d = W.d
    C = c_sigma_sobolev(W, kind, d)
    q = float(v @ C @ v)
    if q < -1e-10:
        raise NumericFailure(f"negative quadratic form {q:.3g}")
    return SobolevEstimate(value=math.sqrt(max(q, 0.0)), method="analytic")


def sobolev_exact_linear(model: LinearModel) -> SobolevEstimate:
    """||w|| sqrt(1 - 1/d) for f(x) = w . x on the sphere."""
    if not isinstance(model, LinearModel):
        raise InvalidArgument("needs a linear model")
    d = model.w.shape[0]
    val = float(np.linalg.norm(model.w)) * math.sqrt(1.0 - 1.0 / d)
    return SobolevEstimate(value=val, method="exact")


def sobolev_monte_carlo(model, d: int, m: int, seed: int) -> SobolevEstimate:
    """Mean squared tangential gradient norm over m sphere samples,
    reported as a square root with the delta-method standard error."""
    if m < 100:
        raise InvalidArgument("m must be >= 100")
    X = sample_sphere(d, m, seed)
    try:
        G = model_gradient(model, X.points)
    except NumericFailure:
        X = sample_sphere(d, m, seed + 1)
        G = model_gradient(model, X.points)
    # project out the radial component
    radial = np.sum(G * X.points, axis=1)
    T = G - radial[:, None] * X.points
    sq = np.sum(T * T, axis=1)
    mean = float(np.mean(sq))
    se_sq = float(np.std(sq, ddof=1) / math.sqrt(m))
    value = math.sqrt(max(mean, 0.0))
    se = se_sq / (2 * value) if value > 0 else se_sq
    return SobolevEstimate(value=value, method="monte_carlo", samples=m, std_error=se)


def poincare_lower_bound(model, d: int, m: int, seed: int) -> float:
    """(d-1) Var f, the spherical-Poincare lower bound on S(f)^2."""
    if m < 10**3:
        raise InvalidArgument("m must be >= 1000")
    X = sample_sphere(d, m, seed)
    fvals = np.asarray(model.predict(X.points), dtype=float)
    return (d - 1) * float(np.var(fvals))


def eta_proxy(model) -> float:
    """sum_j |v_j| ||w_j||, the path-norm upper-bound proxy."""
    view = _two_layer_view(model)
    if view is None:
        raise InvalidArgument("eta proxy needs a two-layer model")
    W, v, _ = view
    return float(np.sum(np.abs(v) * np.linalg.norm(W.W, axis=1)))


@dataclass(frozen=True)
class RobustnessProxies:
    """Cheap norm surrogates; fields are None when the model family does
    not support them."""

    eta: float | None = None
    rkhs_norm: float | None = None
    w_norm: float | None = None


def proxies(model, gram=None) -> RobustnessProxies:
    from .fit import rkhs_norm as _rkhs

    if isinstance(model, LinearModel):
        return RobustnessProxies(w_norm=float(np.linalg.norm(model.w)))
    if isinstance(model, KernelModel):
        return RobustnessProxies(rkhs_norm=_rkhs(model, gram=gram))
    view = _two_layer_view(model)
    if view is not None:
        return RobustnessProxies(eta=eta_proxy(model))
    if isinstance(model, FeatureModel):
        return RobustnessProxies()
    raise InvalidArgument(f"unknown model type {type(model).__name__}")


def coef_norm(model) -> float:
    """Euclidean norm of the trained coefficient vector."""
    if isinstance(model, LinearModel):
        return float(np.linalg.norm(model.w))
    if isinstance(model, TwoLayerModel):
        return float(np.linalg.norm(model.v))
    if isinstance(model, FeatureModel):
        return float(np.linalg.norm(model.a))
    if isinstance(model, KernelModel):
        return float(np.linalg.norm(model.c))
    raise InvalidArgument(f"unknown model type {type(model).__name__}")
