"""Activation catalog: values, a.e. derivatives, Gaussian curvature
coefficients, and the scalar kernel profiles they induce on the sphere.

Conventions pinned here:
  * erf activation is sigma(t) = erf(t / sqrt(2)).
  * kink derivative sigma'(0) = 0 for ReLU and abs (measure-zero set).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import InvalidArgument, NumericFailure, UnsupportedActivation
from .sphere import log_gamma


class ActivationKind(str, Enum):
    RELU = "relu"
    ABS = "abs"
    ERF = "erf"
    TANH = "tanh"
    IDENTITY = "identity"


#: positive-homogeneity order, None for non-homogeneous kinds
HOMOGENEITY = {
    ActivationKind.RELU: 1.0,
    ActivationKind.ABS: 1.0,
    ActivationKind.IDENTITY: 1.0,
    ActivationKind.ERF: None,
    ActivationKind.TANH: None,
}


def act_eval(kind: ActivationKind, t):
    t = np.asarray(t, dtype=float)
    if kind == ActivationKind.RELU:
        return np.maximum(t, 0.0)
    if kind == ActivationKind.ABS:
        return np.abs(t)
    if kind == ActivationKind.ERF:
        return erf(t / math.sqrt(2))
    if kind == ActivationKind.TANH:
        return np.tanh(t)
    if kind == ActivationKind.IDENTITY:
        return t + 0.0
    raise UnsupportedActivation(str(kind))


def act_deriv(kind: ActivationKind, t):
    """Almost-everywhere derivative; returns 0 at the ReLU/abs kink."""
    t = np.asarray(t, dtype=float)
    if kind == ActivationKind.RELU:
        return (t > 0).astype(float)
    if kind == ActivationKind.ABS:
        return np.sign(t)
    if kind == ActivationKind.ERF:
        return math.sqrt(2 / math.pi) * np.exp(-t * t / 2)
    if kind == ActivationKind.TANH:
        return 1.0 - np.tanh(t) ** 2
    if kind == ActivationKind.IDENTITY:
        return np.ones_like(t)
    raise UnsupportedActivation(str(kind))


@dataclass(frozen=True)
class CurvatureCoeffs:
    """Gaussian moments of an activation: beta0 = E[s(z)]^2,
    beta1 = E[z s(z)]^2, beta_star = E[s(z)^2] - beta0 - beta1."""

    beta0: float
    beta1: float
    beta_star: float


def curvature_coeffs(kind: ActivationKind, quad_order: int = 80) -> CurvatureCoeffs:
    """Curvature coefficients by adaptive quadrature against N(0,1); the
    integration range is split at zero so kinked activations converge."""
    if quad_order < 40:
        raise InvalidArgument("quad_order must be >= 40")

    def gauss_mean(f):
        pdf = lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
        neg, _ = quad(lambda z: f(z) * pdf(z), -12.0, 0.0, limit=quad_order)
        pos, _ = quad(lambda z: f(z) * pdf(z), 0.0, 12.0, limit=quad_order)
        return neg + pos

    s = lambda z: float(act_eval(kind, z))
    m0 = gauss_mean(s)
    m1 = gauss_mean(lambda z: z * s(z))
    m2 = gauss_mean(lambda z: s(z) ** 2)
    beta0 = m0 * m0
    beta1 = m1 * m1
    return CurvatureCoeffs(beta0, beta1, m2 - beta0 - beta1)


def _log_cdp(d: int, p: float) -> float:
    # C_{d,p} = 2^{p/2-1} d Gamma((d+p)/2) / Gamma((d+2)/2)
    return (
        (p / 2 - 1) * math.log(2)
        + math.log(d)
        + log_gamma((d + p) / 2)
        - log_gamma((d + 2) / 2)
    )


def catalan_integral(h: Callable, t: float, tol: float = 1e-9) -> float:
    """phi_h(t) = (1/2pi) int_0^{2pi} h(cos u) h(cos(u - arccos t)) du.

    Adaptive quadrature with the interval split at the zeros of both
    cosine arguments: a positively homogeneous h can only be non-smooth
    where its argument vanishes, so the integrand is smooth between the
    breakpoints and kinked activations converge at machine precision.
    """
    theta = math.acos(min(1.0, max(-1.0, t)))
    two_pi = 2 * math.pi
    breaks = sorted(
        {0.0, two_pi}
        | {b % two_pi for b in (math.pi / 2, 3 * math.pi / 2,
                                theta + math.pi / 2, theta + 3 * math.pi / 2)}
    )
    f = lambda u: float(np.asarray(h(math.cos(u))) * np.asarray(h(math.cos(u - theta))))
    total, err = 0.0, 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, e = quad(f, a, b, epsabs=tol / 10, epsrel=1e-12, limit=200)
        total += val
        err += e
    if err > tol * max(1.0, abs(total)) * 10:
        raise NumericFailure("circle quadrature did not converge")
    return total / two_pi


def induced_kappa_quadrature(h: Callable, p: float, d: int, t: float) -> float:
    """Induced-kernel profile of a positive-homogeneous h of order p:

        kappa_h(t) = C_{2,2p} / C_{d,2p} * phi_h(t)

    with phi_h the circle integral above and C_{d,p} the Gamma prefactor.
    """
    if abs(t) > 1 + 1e-12:
        raise InvalidArgument(f"|t| must be <= 1, got {t}")
    pref = math.exp(_log_cdp(2, 2 * p) - _log_cdp(d, 2 * p))
    return pref * catalan_integral(h, t)


def phi_profile(kind: ActivationKind, which: str, t):
    """Dimension-free profile of an order-1 homogeneous activation:
    E[s(x.u) s(x.v)] = phi(u.v)/d (value), or the dimension-free
    E[s'(x.u) s'(x.v)] = phi'(u.v) (derivative).

    ReLU: value (1/2pi)(t arccos(-t) + sqrt(1-t^2)), derivative
    arccos(-t)/(2pi). Identity: t and 1. Abs: closed forms of the circle
    integral, (2/pi)(t arcsin t + sqrt(1-t^2)) and 2 arcsin(t)/pi.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-9):
        raise InvalidArgument("|t| must be <= 1")
    t = np.clip(t, -1.0, 1.0)
    if which not in ("value", "derivative"):
        raise InvalidArgument(f"which must be value|derivative, got {which}")
    if kind == ActivationKind.RELU:
        if which == "value":
            out = (t * np.arccos(-t) + np.sqrt(np.maximum(0.0, 1 - t * t))) / (2 * math.pi)
        else:
            out = np.arccos(-t) / (2 * math.pi)
    elif kind == ActivationKind.IDENTITY:
        out = t if which == "value" else np.ones_like(t)
    elif kind == ActivationKind.ABS:
        if which == "value":
            out = 2 / math.pi * (t * np.arcsin(t) + np.sqrt(np.maximum(0.0, 1 - t * t)))
        else:
            out = 2 * np.arcsin(t) / math.pi
    else:
        raise UnsupportedActivation(f"{kind} has no dimension-free profile")
    return out if out.ndim else float(out)


def kappa_tilde(kind: ActivationKind, d: Optional[int], t):
    """The Sobolev kernel profile t*kappa_{s'}(t) - p*kappa_s(t) of an
    order-1 homogeneous (or tabulated) activation. ``d=None`` drops the
    finite-dimension term (infinite-d limit)."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-9):
        raise InvalidArgument("|t| must be <= 1")
    t = np.clip(t, -1.0, 1.0)
    if kind in (ActivationKind.RELU, ActivationKind.ABS, ActivationKind.IDENTITY):
        lead = t * phi_profile(kind, "derivative", t)
        corr = 0.0 if d is None else phi_profile(kind, "value", t) / d
        out = np.asarray(lead - corr)
    elif kind == ActivationKind.ERF:
        lead = 4 * t / (math.pi * np.sqrt(9 - 4 * t * t))
        corr = 0.0 if d is None else 2 / (math.pi * d) * np.arcsin(2 * t / 3)
        out = np.asarray(lead - corr)
    else:
        raise UnsupportedActivation(f"{kind}: no homogeneity or tabulated profile")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MaclaurinCoeffs:
    a0: float
    a1: float
    a2: float
    a3: float


def maclaurin_at_zero(profile: Callable, h: float = 2e-2) -> MaclaurinCoeffs:
    """First four Taylor coefficients at 0 by Richardson-extrapolated
    central differences (profile must be finite on [-2h, 2h])."""

    def stencil(step):
        vals = np.array([profile(x) for x in (-2 * step, -step, 0.0, step, 2 * step)], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericFailure("non-finite value in difference stencil")
        fm2, fm1, f0, fp1, fp2 = vals
        d1 = (fp1 - fm1) / (2 * step)
        d2 = (fp1 - 2 * f0 + fm1) / step**2
        d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * step**3)
        return f0, d1, d2, d3

    f0, d1a, d2a, d3a = stencil(h)
    _, d1b, d2b, d3b = stencil(h / 2)
    d1 = (4 * d1b - d1a) / 3
    d2 = (4 * d2b - d2a) / 3
    d3 = (4 * d3b - d3a) / 3
    return MaclaurinCoeffs(f0, d1, d2 / 2, d3 / 6)
