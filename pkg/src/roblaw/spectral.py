"""Spectra of the feature-covariance random matrices, their linearized
(constant + linear + diagonal) surrogates, condition numbers, and the
Marchenko-Pastur density and its ridge integrals."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .activations import ActivationKind, act_eval, kappa_tilde, phi_profile
from .errors import InvalidArgument, ResourceLimit, SingularKernel
from .kernels import DotProductKernel, FeatureMap, HiddenWeights, features, gram_dot
from .sphere import SphereSample, sample_sphere

_MAX_COV_ELEMENTS = 2 * 10**8


@dataclass(frozen=True)
class SpectrumSummary:
    """Eigenvalues sorted descending, with extremes and condition number."""

    eigenvalues: np.ndarray
    lambda_min: float
    lambda_max: float
    cond: float


def sym_eigs(A: np.ndarray) -> SpectrumSummary:
    """Full spectrum of a symmetric matrix (symmetrized as (A + A^T)/2)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument("A must be square")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("non-finite entries")
    scale = np.max(np.abs(A))
    if scale > 0 and np.max(np.abs(A - A.T)) > 1e-10 * scale * A.shape[0]:
        raise InvalidArgument("matrix is not symmetric")
    evals = np.linalg.eigvalsh((A + A.T) / 2)[::-1]
    lmin, lmax = float(evals[-1]), float(evals[0])
    cond = lmax / lmin if lmin > 0 else math.inf
    return SpectrumSummary(eigenvalues=evals, lambda_min=lmin, lambda_max=lmax, cond=cond)


def op_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Spectral-norm distance between symmetric matrices."""
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise InvalidArgument("shape mismatch")
    s = sym_eigs(A - B)
    return max(abs(s.lambda_min), abs(s.lambda_max))


def c_sigma_sobolev(W: HiddenWeights, kind: ActivationKind, d: int) -> np.ndarray:
    """The Sobolev quadratic-form matrix: entries are the kappa-tilde
    profile evaluated at w_j . w_l (finite-d correction included)."""
    T = np.clip(W.W @ W.W.T, -1.0, 1.0)
    C = np.asarray(kappa_tilde(kind, d, T))
    return (C + C.T) / 2


def c_sigma_cov(W: HiddenWeights, kind: ActivationKind, d: int) -> np.ndarray:
    """Covariance of sqrt(d) sigma(Wx) for x ~ tau_d, to O(1/d^2):
    entries phi(w_j . w_l) - phi(0)."""
    T = np.clip(W.W @ W.W.T, -1.0, 1.0)
    C = np.asarray(phi_profile(kind, "value", T)) - phi_profile(kind, "value", 0.0)
    return (C + C.T) / 2


def c_phi_monte_carlo(fmap: FeatureMap, m: int, seed: int) -> np.ndarray:
    """Empirical covariance of sqrt(d) Phi(x) over m iid sphere samples."""
    if m < 10**3:
        raise InvalidArgument("m must be >= 1000")
    d = fmap.weights.d
    if fmap.out_dim * m > _MAX_COV_ELEMENTS:
        raise ResourceLimit(f"feature matrix {m} x {fmap.out_dim} too large")
    X = sample_sphere(d, m, seed)
    Z = features(fmap, X.points) * math.sqrt(d)
    mu = Z.mean(axis=0)
    Zc = Z - mu
    C = Zc.T @ Zc / m
    return (C + C.T) / 2


@dataclass(frozen=True)
class LinearizationCoeffs:
    """Coefficients of the constant + linear + diagonal surrogate of a
    dot-product kernel random matrix, plus the rank-one phi''(0)/(2d)
    adjustment (kept separate so it can be toggled)."""

    beta1_const: float
    beta2_lin: float
    beta3_diag: float
    correction: float = 0.0


def linearized_c(W: HiddenWeights, coeffs: LinearizationCoeffs) -> np.ndarray:
    k = W.k
    ones = np.ones((k, k))
    return (
        (coeffs.beta1_const + coeffs.correction) * ones
        + coeffs.beta2_lin * (W.W @ W.W.T)
        + coeffs.beta3_diag * np.eye(k)
    )


def relu_cov_linearization(d: int, include_correction: bool = True) -> LinearizationCoeffs:
    """Linearization of the centered ReLU covariance phi(t) - phi(0):
    constant 0, linear phi'(0) = 1/4, diagonal
    phi(1) - phi(0) - phi'(0) = (pi-2)/(4pi), correction phi''(0)/(2d)."""
    corr = 1.0 / (2 * math.pi) / (2 * d) if include_correction else 0.0
    return LinearizationCoeffs(
        beta1_const=0.0,
        beta2_lin=0.25,
        beta3_diag=(math.pi - 2) / (4 * math.pi),
        correction=corr,
    )


def condition_alpha_sigma(W: HiddenWeights, kind: ActivationKind, d: int) -> float:
    """lambda_max(W W^T) / lambda_min(C_sigma(W)), the condition number of
    W with respect to the activation (ordinary cond(W)^2 for identity)."""
    lam_max_w = sym_eigs(W.W @ W.W.T).lambda_max
    lam_min_c = sym_eigs(c_sigma_cov(W, kind, d)).lambda_min
    if lam_min_c <= 1e-12:
        raise SingularKernel(f"lambda_min(C) = {lam_min_c:.3g} not positive")
    return lam_max_w / lam_min_c


def condition_alpha_phi(fmap: FeatureMap, m: int, seed: int) -> float:
    """Monte-Carlo ||Phi||^2_{L2(tau_d)} / lambda_min(C_Phi)."""
    if m < 10**3:
        raise InvalidArgument("m must be >= 1000")
    d = fmap.weights.d
    X = sample_sphere(d, m, seed)
    Z = features(fmap, X.points)
    energy = float(np.mean(np.sum(Z * Z, axis=1)))
    lam_min = sym_eigs(c_phi_monte_carlo(fmap, m, seed)).lambda_min
    if lam_min <= 0:
        raise SingularKernel("lambda_min(C_Phi) not positive")
    return energy / lam_min


def condition_alpha_gram(
    kernel: DotProductKernel, X: SphereSample, m: int, seed: int
) -> float:
    """lambda_max(K(X,X)) / lambda_min(C_K(X)) * mean_i K(x_i, x_i), with
    C_K(X) the Monte-Carlo covariance of sqrt(d) K(X, x) over x ~ tau_d."""
    if m < 10**3:
        raise InvalidArgument("m must be >= 1000")
    G = gram_dot(kernel, X, X)
    lam_max = sym_eigs(G).lambda_max
    S = sample_sphere(X.dim, m, seed)
    F = np.asarray(gram_dot(kernel, S, X)) * math.sqrt(X.dim)  # (m, n)
    mu = F.mean(axis=0)
    Fc = F - mu
    C = Fc.T @ Fc / m
    lam_min = sym_eigs(C).lambda_min
    if lam_min <= 0:
        raise SingularKernel("lambda_min(C_K(X)) not positive")
    return lam_max / lam_min * float(np.mean(np.diag(G)))


# ---------------------------------------------------------------------------
# Marchenko-Pastur law
# ---------------------------------------------------------------------------


def mp_edges(gamma: float) -> tuple[float, float]:
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    return (1 - math.sqrt(gamma)) ** 2, (1 + math.sqrt(gamma)) ** 2


def mp_atom(gamma: float) -> float:
    """Point mass at zero: (1 - 1/gamma)_+."""
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    return max(0.0, 1.0 - 1.0 / gamma)


def mp_density(gamma: float, t) -> np.ndarray | float:
    """Continuous Marchenko-Pastur density with ratio gamma, unit scale:
    sqrt((t+ - t)(t - t-)) / (2 pi gamma t) on [t-, t+]. The atom at zero
    (gamma > 1) is reported separately by mp_atom."""
    lo, hi = mp_edges(gamma)
    t = np.asarray(t, dtype=float)
    inside = (t > lo) & (t < hi) & (t > 0)
    out = np.zeros_like(t)
    ts = t[inside]
    out[inside] = np.sqrt((hi - ts) * (ts - lo)) / (2 * math.pi * gamma * ts)
    return out if out.ndim else float(out)


def mp_cdf(gamma: float, t) -> np.ndarray | float:
    """CDF of the MP law including the atom at zero."""
    lo, hi = mp_edges(gamma)
    atom = mp_atom(gamma)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        if ti < 0:
            out[i] = 0.0
        elif ti <= lo:
            out[i] = atom
        elif ti >= hi:
            out[i] = 1.0
        else:
            mass, _ = quad(lambda u: mp_density(gamma, u), lo, ti, limit=200)
            out[i] = atom + mass
    return out if out.shape != (1,) else float(out[0])


def mp_integral(gamma: float, nlambda: float, which: str) -> float:
    """Integrals of the ridge resolvents against the MP law (atom handled
    analytically):

      norm: int t/(t + nl)^2 dmu   (1/t at nl = 0; +inf if the atom is
            weighted by an unbounded integrand)
      mse:  1 - 2 int t/(t + nl) dmu + int t^2/(t + nl)^2 dmu
    """
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    if nlambda < 0:
        raise InvalidArgument("nlambda must be nonnegative")
    lo, hi = mp_edges(gamma)
    atom = mp_atom(gamma)

    def integrate(f):
        val, _ = quad(
            lambda t: f(t) * mp_density(gamma, t), lo, hi, limit=400, points=[lo, hi]
        )
        return val

    if which == "norm":
        if nlambda == 0:
            if atom > 0:
                return math.inf  # atom weighted by 1/t
            if lo <= 0:
                return math.inf  # gamma = 1 edge at zero
            return integrate(lambda t: 1.0 / t)
        return integrate(lambda t: t / (t + nlambda) ** 2)
    if which == "mse":
        if nlambda == 0:
            # t/t and t^2/t^2 are 1 on the continuous part, 0 on the atom
            cont = 1.0 - atom
            return 1.0 - 2.0 * cont + cont
        i1 = integrate(lambda t: t / (t + nlambda))
        i2 = integrate(lambda t: t * t / (t + nlambda) ** 2)
        return 1.0 - 2.0 * i1 + i2
    raise InvalidArgument(f"unknown integral kind {which}")
