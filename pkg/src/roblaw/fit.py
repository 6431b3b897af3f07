"""Fitting in the representer subspace: min-norm / ridged kernel
interpolation, feature-space ridge, linear least squares, and the
Marchenko-Pastur reference limits for ridge(less) regression.

Solver policy: symmetric positive-definite factorization with jitter
escalation 0 -> 1e-12*lmax -> 1e-10*lmax, then an eigendecomposition
pseudo-inverse (threshold 1e-10*lmax). Fallbacks are recorded in the fit
meta for reproducibility audits.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .activations import ActivationKind, act_eval
from .data import Dataset
from .errors import InvalidArgument, InvalidRegime, SingularKernel
from .kernels import (
    DotProductKernel,
    FeatureMap,
    HiddenWeights,
    cross_gram,
    empirical_gram,
    features,
    gram_dot,
    kernel_profile,
)
from .sphere import SphereSample


@dataclass(frozen=True)
class LinearModel:
    w: np.ndarray
    meta: dict = field(default_factory=dict)

    def predict(self, x):
        return np.asarray(x, dtype=float) @ self.w


@dataclass(frozen=True)
class TwoLayerModel:
    W: HiddenWeights
    v: np.ndarray
    activation: ActivationKind
    meta: dict = field(default_factory=dict)

    def predict(self, x):
        pre = np.asarray(x, dtype=float) @ self.W.W.T
        return np.asarray(act_eval(self.activation, pre)) @ self.v


@dataclass(frozen=True)
class KernelModel:
    kernel: DotProductKernel
    anchors: SphereSample
    c: np.ndarray
    meta: dict = field(default_factory=dict)

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        T = np.clip(X @ self.anchors.points.T, -1.0, 1.0)
        out = np.asarray(kernel_profile(self.kernel, T)) @ self.c
        return float(out[0]) if single else out


@dataclass(frozen=True)
class FeatureModel:
    map: FeatureMap
    a: np.ndarray
    meta: dict = field(default_factory=dict)

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        out = features(self.map, X) @ self.a
        return float(out[0]) if single else out


def solve_psd(K: np.ndarray, y: np.ndarray, lam: float) -> tuple[np.ndarray, dict]:
    """Solve (K + lam*I) c = y for symmetric PSD K, with jitter escalation
    and a pseudo-inverse fallback. Returns (c, meta)."""
    n = K.shape[0]
    if not np.all(np.isfinite(K)) or not np.all(np.isfinite(y)):
        raise InvalidArgument("non-finite entries in solve")
    lmax = float(np.max(np.abs(np.diag(K))))
    if lmax <= 0:
        lmax = float(np.max(np.abs(K), initial=0.0))
    if lmax <= 0:
        raise SingularKernel("kernel matrix is zero")
    A = K + lam * np.eye(n) if lam > 0 else K
    for jitter in (0.0, 1e-12 * lmax, 1e-10 * lmax):
        try:
            cf = scipy.linalg.cho_factor(
                A + jitter * np.eye(n) if jitter else A, lower=True
            )
            c = scipy.linalg.cho_solve(cf, y)
            return c, {"solver": "cholesky", "jitter": jitter, "fallback": jitter > 0}
        except np.linalg.LinAlgError:
            continue
        except scipy.linalg.LinAlgError:
            continue
    # eigendecomposition pseudo-inverse
    evals, evecs = np.linalg.eigh((A + A.T) / 2)
    top = float(evals[-1])
    if top <= 0:
        raise SingularKernel("kernel matrix has no positive eigenvalue")
    keep = evals > 1e-10 * top
    c = evecs[:, keep] @ ((evecs[:, keep].T @ y) / evals[keep])
    return c, {"solver": "pinv", "jitter": 0.0, "fallback": True,
               "rank": int(keep.sum())}


def effective_lambda(lam: float, convention: str, k: int = 0, d: int = 0) -> float:
    """plain: lam; rf_scaled: k*lam/d (the RF ridge convention)."""
    if convention == "plain":
        return lam
    if convention == "rf_scaled":
        if k <= 0 or d <= 0:
            raise InvalidArgument("rf_scaled needs positive k and d")
        return k * lam / d
    raise InvalidArgument(f"unknown lambda convention {convention}")


def fit_kernel(
    kernel: DotProductKernel,
    data: Dataset,
    lam: float = 0.0,
    lambda_convention: str = "plain",
    k: int = 0,
) -> KernelModel:
    """Ridge(less) fit in the representer subspace:
    c = (K(X,X) + lam_eff I)^-1 y."""
    if lam < 0:
        raise InvalidArgument("lambda must be nonnegative")
    if not np.all(np.isfinite(data.y)):
        raise InvalidArgument("NaN targets")
    lam_eff = effective_lambda(lam, lambda_convention, k=k, d=data.d)
    K = gram_dot(kernel, data.X, data.X)
    c, meta = solve_psd(K, data.y, lam_eff)
    meta = dict(meta, **{"lambda": lam, "lambda_eff": lam_eff})
    return KernelModel(kernel=kernel, anchors=data.X, c=c, meta=meta)


def fit_features(fmap: FeatureMap, data: Dataset, lam: float = 0.0) -> FeatureModel:
    """Feature-space ridge. Dual solve when n <= feature dim (NTK feature
    vectors are recovered blockwise, never materialized), else primal
    normal equations."""
    if lam < 0:
        raise InvalidArgument("lambda must be nonnegative")
    if not np.all(np.isfinite(data.y)):
        raise InvalidArgument("NaN targets")
    n, m = data.n, fmap.out_dim
    if n <= m:
        G = empirical_gram(fmap, data.X)
        alpha, meta = solve_psd(G, data.y, lam)
        if fmap.kind == "frozen_rf":
            Z = features(fmap, data.X.points)
            a = Z.T @ alpha
        else:
            from .activations import act_deriv

            W = fmap.weights.W
            k = W.shape[0]
            S = np.asarray(act_deriv(fmap.activation, data.X.points @ W.T))
            a = ((S * alpha[:, None]).T @ data.X.points / math.sqrt(k)).reshape(-1)
    else:
        Z = features(fmap, data.X.points)
        a, meta = solve_psd(Z.T @ Z, Z.T @ data.y, lam)
    meta = dict(meta, **{"lambda": lam, "lambda_eff": lam})
    return FeatureModel(map=fmap, a=a, meta=meta)


def fit_linear_minnorm(data: Dataset) -> LinearModel:
    """Minimum-norm interpolant w = X^T (X X^T)^-1 y, n <= d."""
    if data.n > data.d:
        raise InvalidRegime(f"min-norm interpolation needs n <= d, got {data.n} > {data.d}")
    G = data.X.points @ data.X.points.T
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularKernel(f"X X^T is numerically singular (cond={cond:.3g})")
    c = np.linalg.solve(G, data.y)
    return LinearModel(w=data.X.points.T @ c, meta={"solver": "gram", "fallback": False})


def fit_linear_ridge(data: Dataset, lam: float = 0.0) -> LinearModel:
    """Linear ridge / least squares for any n, d (dual when n <= d)."""
    X = data.X.points
    if data.n <= data.d:
        c, meta = solve_psd(X @ X.T, data.y, lam)
        w = X.T @ c
    else:
        w, meta = solve_psd(X.T @ X, X.T @ data.y, lam)
    return LinearModel(w=w, meta=dict(meta, **{"lambda": lam}))


def train_mse(model, data: Dataset) -> float:
    r = model.predict(data.X.points) - data.y
    return float(np.mean(r * r))


def test_mse(model, test: Dataset) -> float:
    return train_mse(model, test)


def rkhs_norm(model: KernelModel, gram=None) -> float:
    K = gram if gram is not None else gram_dot(model.kernel, model.anchors, model.anchors)
    q = float(model.c @ K @ model.c)
    return math.sqrt(max(q, 0.0))


def ridgeless_norm_limit(gamma: float) -> float:
    """Asymptotic |w_hat|^2 / (n ^ d) of the ridgeless regressor: 1/|1-gamma|.
    Diverges at the interpolation threshold gamma = 1."""
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    if gamma == 1:
        return math.inf
    return 1.0 / abs(1.0 - gamma)


def mse_limit(gamma: float, regime: str = "ridgeless") -> float:
    """Asymptotic training MSE: ridgeless (1 - 1/gamma)_+, large ridge 1."""
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    if regime == "ridgeless":
        return max(0.0, 1.0 - 1.0 / gamma)
    if regime == "large_ridge":
        return 1.0
    raise InvalidArgument(f"unknown regime {regime}")


def ridge_norm_closed_form(gamma: float, nlambda: float) -> float:
    """The closed-form expression reported for |w_hat|^2/n at scaled ridge
    n*lambda. Exposed verbatim for reference; at nlambda=0 it evaluates to 0,
    which disagrees with the ridgeless 1/|1-gamma| limit -- prefer
    ridgeless_norm_limit / mp_integral as ground truth (see README)."""
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    a = gamma - nlambda + 1
    return a / (2 * gamma * math.sqrt(a * a + 4 * nlambda)) - 1 / (2 * gamma)
