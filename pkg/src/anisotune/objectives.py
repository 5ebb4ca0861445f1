"""Artificial fitness functions and the noise models that turn them into oracles.

All fitness functions are vectorised over leading axes: ``x`` has shape
``(..., D)`` and the result has shape ``(...)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import RngStream


def modified_rosenbrock(x, beta: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 2:
        raise ValueError("modified Rosenbrock needs D >= 2")
    head, tail = x[..., :-1], x[..., 1:]
    s = np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2, axis=-1)
    return np.exp(-beta * s)


def asymmetric_quadratic(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 1.0 - np.mean((1.0 + 0.9 * np.sign(x)) * x**2, axis=-1)


def symmetric_quadratic(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 1.0 - np.mean(x**2, axis=-1)


def anisotropic_gaussian(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError(f"anisotropic_gaussian is defined for D=2, got D={x.shape[-1]}")
    return np.exp(-100.0 * x[..., 0] ** 2 - x[..., 1] ** 2)


def gaussian_objective(x, M, center) -> np.ndarray:
    """Normalised Gaussian kernel evaluated at ``M (x - center)``.

    The Hessian at the peak is ``-f(center) * M M^T``.
    """
    x = np.asarray(x, dtype=float)
    M = np.asarray(M, dtype=float)
    z = (x - np.asarray(center, dtype=float)) @ M.T
    d = x.shape[-1]
    return (2.0 * np.pi) ** (-d / 2) * np.exp(-0.5 * np.sum(z * z, axis=-1))


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    sigma: float = 0.0

    KINDS = ("none", "bernoulli", "gaussian")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {self.KINDS}")
        if self.sigma < 0:
            raise ValueError("noise sigma must be >= 0")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def bernoulli(cls) -> "NoiseModel":
        return cls("bernoulli")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("gaussian", float(sigma))

    def apply(self, values: np.ndarray, rng: RngStream) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.kind == "none":
            return values
        if self.kind == "gaussian":
            return values + rng.normal(size=values.shape, scale=self.sigma)
        if np.any((values < 0.0) | (values > 1.0)) or np.any(np.isnan(values)):
            raise ValueError("Bernoulli observation needs f(x) in [0, 1]")
        return (rng.random(values.shape) < values).astype(float)


@dataclass
class NoisyObjective:
    """Oracle returning one noisy observation per evaluated point.

    ``call_count`` is the budget ledger: it grows by exactly one for every
    observation, whether made through :meth:`observe` or :meth:`observe_batch`.
    """

    true_f: Callable[[np.ndarray], np.ndarray]
    dim: int
    noise: NoiseModel = field(default_factory=NoiseModel)
    f_opt: Optional[float] = None
    name: str = ""
    call_count: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def _charge(self, n: int) -> None:
        with self._lock:
            self.call_count += n

    def _check(self, X: np.ndarray) -> None:
        if X.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {X.shape[-1]}")

    def observe(self, x, rng: RngStream) -> float:
        x = np.asarray(x, dtype=float)
        self._check(x)
        y = self.noise.apply(self.true_f(x), rng)
        self._charge(1)
        return float(y)

    def observe_batch(self, X, rng: RngStream) -> np.ndarray:
        """Observe every row of ``X``; noise for the batch comes from ``rng``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self._check(X)
        y = self.noise.apply(self.true_f(X), rng)
        self._charge(X.shape[0])
        return y

    def fitness(self, x) -> float:
        """Noiseless value at ``x``; never charged to the budget."""
        return float(self.true_f(np.asarray(x, dtype=float)))


OBJECTIVES = ("mod-rosenbrock", "asym-quad", "aniso-gauss", "sym-quad", "gaussian")


def make_objective(
    name: str,
    dim: int,
    noise: NoiseModel | None = None,
    *,
    beta: float = 0.5,
    M=None,
    center=None,
) -> NoisyObjective:
    noise = noise or NoiseModel()
    if name == "mod-rosenbrock":
        return NoisyObjective(lambda x: modified_rosenbrock(x, beta), dim, noise, 1.0, name)
    if name == "asym-quad":
        return NoisyObjective(asymmetric_quadratic, dim, noise, 1.0, name)
    if name == "sym-quad":
        return NoisyObjective(symmetric_quadratic, dim, noise, 1.0, name)
    if name == "aniso-gauss":
        if dim != 2:
            raise ValueError("aniso-gauss is two-dimensional")
        return NoisyObjective(anisotropic_gaussian, 2, noise, 1.0, name)
    if name == "gaussian":
        M = np.eye(dim) if M is None else np.asarray(M, dtype=float)
        center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        peak = (2.0 * np.pi) ** (-dim / 2)
        return NoisyObjective(lambda x: gaussian_objective(x, M, center), dim, noise, peak, name)
    raise ValueError(f"unknown objective {name!r}; expected one of {OBJECTIVES}")
