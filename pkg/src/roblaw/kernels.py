"""Dot-product kernel catalog, finite RF/NTK feature maps, gram matrices,
and gradients of every fitted-model family.

Normalization convention: the infinite-width RF/NTK kernels use the
unnormalized arc-cosine-style profiles (1/pi scale), i.e. twice the
dimension-free activation profile. Min-norm interpolation is invariant to
this global scale; the ``scale`` field aligns conventions when a ridge is
active.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .activations import (
    ActivationKind,
    HOMOGENEITY,
    act_deriv,
    act_eval,
    phi_profile,
)
from .errors import InvalidArgument, NumericFailure, UnsupportedActivation
from .sphere import SphereSample

_CLAMP_SLACK = 1e-9


def _clip_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _CLAMP_SLACK):
        raise InvalidArgument("dot products must lie in [-1, 1]")
    return np.clip(t, -1.0, 1.0)


@dataclass(frozen=True)
class DotProductKernel:
    """A kernel K(x, x') = scale * profile(x.x') on the unit sphere.

    Names: linear, polynomial(c, p), gaussian(s), laplace(s),
    exp_type(s, beta), arccos0, arccos1, rf_infinite(activation),
    ntk_infinite(activation).
    """

    name: str
    c: float = 0.0
    p: int = 1
    s: float = 1.0
    beta: float = 1.0
    activation: Optional[ActivationKind] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise InvalidArgument("scale must be positive")
        if self.name in ("rf_infinite", "ntk_infinite"):
            if self.activation is None:
                raise InvalidArgument(f"{self.name} requires an activation")
            if HOMOGENEITY.get(self.activation) != 1.0:
                raise UnsupportedActivation(
                    f"{self.name} supports order-1 homogeneous activations only"
                )


def kernel_profile(kernel: DotProductKernel, t):
    """phi(t) * scale for the catalog entry."""
    t = _clip_t(t)
    name = kernel.name
    if name == "linear":
        out = t + 0.0
    elif name == "polynomial":
        out = (t + kernel.c) ** kernel.p
    elif name == "gaussian":
        out = np.exp(-(2 - 2 * t) / kernel.s**2)
    elif name == "laplace":
        out = np.exp(-np.sqrt(np.maximum(0.0, 2 - 2 * t)) / kernel.s)
    elif name == "exp_type":
        out = np.exp(-np.maximum(0.0, 2 - 2 * t) ** (kernel.beta / 2) / kernel.s)
    elif name == "arccos0":
        out = np.arccos(-t) / math.pi
    elif name == "arccos1":
        out = (t * np.arccos(-t) + np.sqrt(np.maximum(0.0, 1 - t * t))) / math.pi
    elif name == "rf_infinite":
        out = 2.0 * np.asarray(phi_profile(kernel.activation, "value", t))
    elif name == "ntk_infinite":
        out = t * 2.0 * np.asarray(phi_profile(kernel.activation, "derivative", t))
    else:
        raise InvalidArgument(f"unknown kernel {name}")
    out = np.asarray(out) * kernel.scale
    return out if out.ndim else float(out)


def kernel_profile_deriv(kernel: DotProductKernel, t):
    """Analytic phi'(t) * scale. Profiles with an endpoint singularity
    (arccos0 at |t| = 1) return a signed infinity."""
    t = _clip_t(t)
    name = kernel.name
    with np.errstate(divide="ignore"):
        if name == "linear":
            out = np.ones_like(t)
        elif name == "polynomial":
            out = kernel.p * (t + kernel.c) ** (kernel.p - 1)
        elif name == "gaussian":
            out = 2 / kernel.s**2 * np.exp(-(2 - 2 * t) / kernel.s**2)
        elif name == "laplace":
            r = np.sqrt(np.maximum(0.0, 2 - 2 * t))
            out = np.exp(-r / kernel.s) / (kernel.s * r)
        elif name == "exp_type":
            r = np.maximum(0.0, 2 - 2 * t)
            out = (
                kernel.beta
                / kernel.s
                * r ** (kernel.beta / 2 - 1)
                * np.exp(-(r ** (kernel.beta / 2)) / kernel.s)
            )
        elif name == "arccos0":
            out = 1.0 / (math.pi * np.sqrt(np.maximum(0.0, 1 - t * t)))
        elif name == "arccos1":
            out = np.arccos(-t) / math.pi
        elif name == "rf_infinite":
            # d/dt of 2*phi_value = 2*phi_derivative for order-1 profiles
            out = 2.0 * np.asarray(phi_profile(kernel.activation, "derivative", t))
        elif name == "ntk_infinite":
            phi0 = 2.0 * np.asarray(phi_profile(kernel.activation, "derivative", t))
            if kernel.activation == ActivationKind.RELU:
                dphi0 = 2.0 / (2 * math.pi * np.sqrt(np.maximum(0.0, 1 - t * t)))
            elif kernel.activation == ActivationKind.ABS:
                dphi0 = 2.0 * (2 / math.pi) / np.sqrt(np.maximum(0.0, 1 - t * t))
            elif kernel.activation == ActivationKind.IDENTITY:
                dphi0 = np.zeros_like(np.asarray(t))
            else:
                raise UnsupportedActivation(str(kernel.activation))
            out = phi0 + t * dphi0
        else:
            raise InvalidArgument(f"unknown kernel {name}")
    out = np.asarray(out) * kernel.scale
    return out if out.ndim else float(out)


def gram_dot(kernel: DotProductKernel, A: SphereSample, B: SphereSample) -> np.ndarray:
    """G[i, j] = scale * phi(a_i . b_j)."""
    if A.dim != B.dim:
        raise InvalidArgument(f"dimension mismatch: {A.dim} vs {B.dim}")
    T = np.clip(A.points @ B.points.T, -1.0, 1.0)
    G = np.asarray(kernel_profile(kernel, T))
    if A is B or (A.count == B.count and A.points is B.points):
        G = (G + G.T) / 2
    return G


@dataclass(frozen=True)
class HiddenWeights:
    """Hidden-layer weight matrix, k rows in R^d."""

    W: np.ndarray
    row_normalized: bool = True

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2:
            raise InvalidArgument("W must be a matrix")
        if self.row_normalized:
            norms = np.linalg.norm(W, axis=1)
            if not np.all(np.abs(norms - 1.0) <= 1e-9):
                raise InvalidArgument("rows must be unit-normalized")
        object.__setattr__(self, "W", W)

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class FeatureMap:
    """Finite-width embedding: frozen random features (output dim k) or
    NTK features sigma'(Wx) (x) x / sqrt(k) (output dim k*d)."""

    kind: str  # "frozen_rf" | "ntk"
    weights: HiddenWeights
    activation: ActivationKind = ActivationKind.RELU

    def __post_init__(self):
        if self.kind not in ("frozen_rf", "ntk"):
            raise InvalidArgument(f"unknown feature map kind {self.kind}")

    @property
    def out_dim(self) -> int:
        k, d = self.weights.k, self.weights.d
        return k if self.kind == "frozen_rf" else k * d


def rf_features(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    """(1/sqrt(k)) sigma(W x); x may be a single point or an (m, d) batch."""
    if fmap.kind != "frozen_rf":
        raise InvalidArgument("rf_features requires a frozen_rf map")
    W = fmap.weights.W
    x = np.asarray(x, dtype=float)
    pre = x @ W.T
    return np.asarray(act_eval(fmap.activation, pre)) / math.sqrt(W.shape[0])


def ntk_features(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    """(1/sqrt(k)) sigma'(W x) (x) x, blocks j = sigma'(x.w_j) * x."""
    if fmap.kind != "ntk":
        raise InvalidArgument("ntk_features requires an ntk map")
    W = fmap.weights.W
    k, d = W.shape
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    S = np.asarray(act_deriv(fmap.activation, X @ W.T))  # (m, k)
    Z = (S[:, :, None] * X[:, None, :]).reshape(X.shape[0], k * d) / math.sqrt(k)
    return Z[0] if single else Z


def features(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    return rf_features(fmap, x) if fmap.kind == "frozen_rf" else ntk_features(fmap, x)


def empirical_gram(fmap: FeatureMap, X: SphereSample) -> np.ndarray:
    """G = Z Z^T with Z the feature rows. NTK uses the Hadamard identity
    K_ntk = (X X^T) o ((1/k) S S^T), S = sigma'(X W^T), so the k*d-dim
    features are never materialized."""
    if X.dim != fmap.weights.d:
        raise InvalidArgument("sample dimension does not match weights")
    if fmap.kind == "frozen_rf":
        Z = rf_features(fmap, X.points)
        G = Z @ Z.T
    else:
        S = np.asarray(act_deriv(fmap.activation, X.points @ fmap.weights.W.T))
        G = (X.points @ X.points.T) * (S @ S.T) / fmap.weights.k
    return (G + G.T) / 2


def cross_gram(fmap: FeatureMap, A: SphereSample, B: SphereSample) -> np.ndarray:
    """K(A, B) under the empirical feature kernel."""
    if fmap.kind == "frozen_rf":
        return rf_features(fmap, A.points) @ rf_features(fmap, B.points).T
    SA = np.asarray(act_deriv(fmap.activation, A.points @ fmap.weights.W.T))
    SB = np.asarray(act_deriv(fmap.activation, B.points @ fmap.weights.W.T))
    return (A.points @ B.points.T) * (SA @ SB.T) / fmap.weights.k


def model_gradient(model, x: np.ndarray) -> np.ndarray:
    """Euclidean gradient of a fitted model at x (single point or batch).

    Kernel-representer gradients near |t| = 1 clamp t to 1 - 1e-9 where the
    profile derivative diverges (arccos0); NTK feature Jacobians drop the
    distributional sigma'' term (a.e. correct for piecewise-linear sigma').
    """
    from .fit import FeatureModel, KernelModel, LinearModel, TwoLayerModel

    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x

    if isinstance(model, LinearModel):
        G = np.broadcast_to(model.w, X.shape).copy()
    elif isinstance(model, TwoLayerModel):
        W = model.W.W
        S = np.asarray(act_deriv(model.activation, X @ W.T))  # (m, k)
        G = (S * model.v) @ W
    elif isinstance(model, KernelModel):
        T = np.clip(X @ model.anchors.points.T, -(1 - 1e-9), 1 - 1e-9)
        D = np.asarray(kernel_profile_deriv(model.kernel, T))  # (m, n)
        if not np.all(np.isfinite(D)):
            bad = T.flat[np.argmax(~np.isfinite(D))]
            raise NumericFailure(f"kernel profile not differentiable at t={bad}")
        G = (D * model.c) @ model.anchors.points
    elif isinstance(model, FeatureModel):
        W = model.map.weights.W
        k = W.shape[0]
        S = np.asarray(act_deriv(model.map.activation, X @ W.T))
        if model.map.kind == "frozen_rf":
            G = (S * model.a) @ W / math.sqrt(k)
        else:
            A = model.a.reshape(k, -1)  # (k, d) blocks
            G = (S @ A) / math.sqrt(k)
    else:
        raise InvalidArgument(f"cannot differentiate model {type(model).__name__}")
    return G[0] if single else G
