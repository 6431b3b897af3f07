"""Uniform-sphere geometry: sampling, tangent projection, exact mixed moments.

RNG: numpy's PCG64 (``default_rng``) with explicit 64-bit seeding. The
generator choice is pinned here so golden files stay stable across runs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SphereSample:
    """n points on the unit sphere S^{d-1}, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidArgument("points must be a 2-d array")
        if pts.shape[1] < 2:
            raise InvalidArgument("dimension must be >= 2")
        norms = np.linalg.norm(pts, axis=1)
        if not np.all(np.abs(norms - 1.0) <= 1e-9):
            raise InvalidArgument("every row must have unit norm")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]


def sample_sphere(d: int, n: int, seed: int) -> SphereSample:
    """n iid uniform points on S^{d-1}: normalized standard-Gaussian rows.

    Deterministic given the seed (PCG64 stream).
    """
    if d < 2:
        raise InvalidArgument(f"d must be >= 2, got {d}")
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return SphereSample(g)


def project_tangent(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Project g onto the tangent space of the sphere at x: g - (x.g)x."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    if x.shape != g.shape:
        raise InvalidArgument(f"dimension mismatch: {x.shape} vs {g.shape}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise InvalidArgument("x must be a unit vector")
    return g - (x @ g) * x


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x), x > 0."""
    if x <= 0:
        raise InvalidArgument(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def moment_cpq(p: int, q: int, d: int, s: float) -> float:
    """E[(x.u)^p (x.v)^q] for x uniform on S^{d-1} and unit u, v with u.v = s.

    Zero when p and q have opposite parity. Otherwise the closed-form sum

        p! q! Gamma(d/2) / (2^{p+q} Gamma((d+p+q)/2))
            * sum_t 2^t / (t! ((p-t)/2)! ((q-t)/2)!) s^t

    over 0 <= t <= min(p,q) of the same parity as p. Gamma ratios are done
    in log space so large d is safe.

    Note: a published table entry for the (2,2) case omits the constant
    term of this sum; the general formula is used here (Monte Carlo
    arbitrates, see README).
    """
    if p < 0 or q < 0:
        raise InvalidArgument("p and q must be nonnegative")
    if p + q > 12:
        raise InvalidArgument("p + q must be <= 12 (double-precision stability)")
    if d < 2:
        raise InvalidArgument("d must be >= 2")
    if abs(s) > 1 + 1e-12:
        raise InvalidArgument(f"|s| must be <= 1, got {s}")
    s = min(1.0, max(-1.0, s))
    if (p + q) % 2 == 1:
        return 0.0
    log_pref = (
        log_gamma(p + 1)
        + log_gamma(q + 1)
        + log_gamma(d / 2)
        - (p + q) * math.log(2)
        - log_gamma((d + p + q) / 2)
    )
    total = 0.0
    for t in range(p % 2, min(p, q) + 1, 2):
        log_term = (
            t * math.log(2)
            - log_gamma(t + 1)
            - log_gamma((p - t) // 2 + 1)
            - log_gamma((q - t) // 2 + 1)
        )
        total += math.exp(log_pref + log_term) * s**t
    return total
