"""The generic dataset: unit-sphere inputs with noisy-linear labels
y_i = w0.x_i + z_i, z_i ~ N(0, zeta^2). Bayes error is zeta^2."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .sphere import SphereSample, sample_sphere


@dataclass(frozen=True)
class Dataset:
    X: SphereSample
    y: np.ndarray
    w0: np.ndarray
    zeta: float
    seed: int

    @property
    def n(self) -> int:
        return self.X.count

    @property
    def d(self) -> int:
        return self.X.dim

    @property
    def bayes_error(self) -> float:
        return self.zeta**2


def gen_dataset(n: int, d: int, zeta: float, seed: int, zero_signal: bool = False) -> Dataset:
    """Draw X ~ tau_d^n, w0 uniform on the sphere (or 0 when zero_signal,
    the noise-only setup of the ridge analysis), z ~ N(0, zeta^2)^n."""
    if n < 1 or d < 2:
        raise InvalidArgument(f"need n >= 1 and d >= 2, got n={n}, d={d}")
    if zeta < 0:
        raise InvalidArgument("zeta must be nonnegative")
    X = sample_sphere(d, n, seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    w0 = rng.standard_normal(d)
    w0 /= np.linalg.norm(w0)
    if zero_signal:
        w0 = np.zeros(d)
    z = rng.standard_normal(n) * zeta
    y = X.points @ w0 + z
    return Dataset(X=X, y=y, w0=w0, zeta=float(zeta), seed=seed)
