"""Monte-Carlo gradient estimators of the Gaussian-smoothed objective.

With ``h(L, x) = E_v[f(L v + x)]`` and ``v ~ N(0, I)``::

    dh/dx = L^{-T} E[v f(Lv + x)]
    dh/dL = L^{-T} E[(v v^T - I) f(Lv + x)]

The estimators return the raw moments (``gx``, ``gL``) without the
``L^{-T}`` factor. Optimizers precondition by ``L L^T``, which turns the
update into ``L @ gx`` and ``L @ gL`` and never needs an inverse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import RngStream
from .objectives import NoisyObjective


@dataclass
class GradEstimate:
    gx: np.ndarray
    gL: np.ndarray
    batch_size: int
    # per-sample directions and observations, kept for standard errors
    v: np.ndarray = field(repr=False, default=None)
    y: np.ndarray = field(repr=False, default=None)

    def grad_x(self, L) -> np.ndarray:
        """Unpreconditioned estimate of dh/dx."""
        return np.linalg.solve(np.asarray(L, dtype=float).T, self.gx)

    def grad_L(self, L) -> np.ndarray:
        """Unpreconditioned estimate of dh/dL."""
        return np.linalg.solve(np.asarray(L, dtype=float).T, self.gL)


@dataclass
class IsoGradEstimate:
    hx: np.ndarray
    hw: float
    batch_size: int


def anisotropic_moments(v: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch means of ``v y`` and ``(v v^T - I) y``."""
    B, d = v.shape
    gx = v.T @ y / B
    gL = (v * y[:, None]).T @ v / B - np.mean(y) * np.eye(d)
    return gx, gL


def estimate_anisotropic(
    obj: NoisyObjective, x, L, B: int, rng: RngStream
) -> GradEstimate:
    if B < 1:
        raise ValueError(f"batch size must be >= 1, got {B}")
    x = np.asarray(x, dtype=float)
    L = np.asarray(L, dtype=float)
    d = x.shape[0]
    if L.shape != (d, d):
        raise ValueError(f"L must be {d}x{d}, got {L.shape}")
    v = rng.child("directions").normal(size=(B, d))
    y = obj.observe_batch(x + v @ L.T, rng.child("oracle"))
    gx, gL = anisotropic_moments(v, y)
    return GradEstimate(gx, gL, B, v, y)


def estimate_isotropic(
    obj: NoisyObjective, x, w: float, B: int, rng: RngStream
) -> IsoGradEstimate:
    if w <= 0:
        raise ValueError(f"window size must be > 0, got {w}")
    if B < 1:
        raise ValueError(f"batch size must be >= 1, got {B}")
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    v = rng.child("directions").normal(size=(B, d))
    y = obj.observe_batch(x + w * v, rng.child("oracle"))
    # (u - x) / w^2 = v / w  and  |u - x|^2 / w^3 - D / w = (|v|^2 - D) / w
    hx = v.T @ y / (B * w)
    hw = float(np.mean((np.sum(v * v, axis=1) - d) * y) / w)
    return IsoGradEstimate(hx, hw, B)


def estimate_sphere(obj: NoisyObjective, x, w: float, B: int, rng: RngStream) -> np.ndarray:
    """One-point sphere-smoothing estimate ``D * mean(f(x + w e) e)`` with ``e``
    uniform on the unit sphere; its mean is ``w`` times the gradient of the
    ball-smoothed objective, matching the scale of ``gx``."""
    if w <= 0:
        raise ValueError(f"window size must be > 0, got {w}")
    if B < 1:
        raise ValueError(f"batch size must be >= 1, got {B}")
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    g = rng.child("directions").normal(size=(B, d))
    e = g / np.linalg.norm(g, axis=1, keepdims=True)
    y = obj.observe_batch(x + w * e, rng.child("oracle"))
    return d * (e.T @ y) / B


MAX_QUADRATURE_DIM = 4


def smoothed_value_oracle(true_f, x, L, order: int = 12) -> float:
    """Tensor Gauss-Hermite value of ``E_v[f(L v + x)]``.

    Exact for polynomial ``f`` of total degree below ``2 * order``. Test-only:
    evaluations here are not charged to any budget.
    """
    x = np.asarray(x, dtype=float)
    L = np.asarray(L, dtype=float)
    d = x.shape[0]
    if d > MAX_QUADRATURE_DIM:
        raise ValueError(f"quadrature oracle supports D <= {MAX_QUADRATURE_DIM}, got {d}")
    if order < 8:
        raise ValueError(f"quadrature order must be >= 8, got {order}")
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    weights = weights / np.sqrt(2.0 * np.pi)
    grid = np.array(list(itertools.product(nodes, repeat=d)))
    w = np.prod(np.array(list(itertools.product(weights, repeat=d))), axis=1)
    values = np.asarray(true_f(x + grid @ L.T), dtype=float)
    return float(w @ values)
