"""Seeded random streams and the few matrix helpers shared by every module."""

from __future__ import annotations

import zlib
from typing import Union

import numpy as np

Label = Union[int, str]

_MASK64 = (1 << 64) - 1


def _label_key(label: Label) -> int:
    if isinstance(label, (bool, np.bool_)):
        raise TypeError("stream labels must be int or str")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"stream labels must be non-negative, got {label}")
        return int(label)
    if isinstance(label, str):
        # crc32 is stable across interpreters, unlike hash()
        return zlib.crc32(label.encode("utf-8"))
    raise TypeError(f"stream labels must be int or str, got {type(label).__name__}")


class RngStream:
    """Reproducible random stream addressed by ``(seed, key)``.

    Child streams are derived with :meth:`child` from a path of labels, so a
    batch of oracle calls can each own an independent stream and produce the
    same numbers no matter which order (or which worker) evaluates them.
    ``position`` counts the variates drawn so far.
    """

    __slots__ = ("seed", "key", "position", "_gen")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed) & _MASK64
        self.key = tuple(int(k) for k in key)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.PCG64(seq))
        self.position = 0

    def child(self, *labels: Label) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(_label_key(lab) for lab in labels))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key}, position={self.position})"

    def _advance(self, size) -> None:
        self.position += int(np.prod(size)) if size is not None else 1

    def normal(self, size=None, scale: float = 1.0):
        self._advance(size)
        return self._gen.normal(0.0, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        self._advance(size)
        return self._gen.uniform(low, high, size)

    def integers(self, low: int, high: int | None = None, size=None):
        self._advance(size)
        return self._gen.integers(low, high, size)

    def random(self, size=None):
        self._advance(size)
        return self._gen.random(size)

    def rademacher(self, size) -> np.ndarray:
        """Uniform draws from {-1, +1}."""
        self._advance(size)
        return np.where(self._gen.random(size) < 0.5, -1.0, 1.0)

    def permutation(self, n: int) -> np.ndarray:
        self._advance(n)
        return self._gen.permutation(n)

    def argsort_keys(self, shape) -> np.ndarray:
        """Random float keys, used for vectorised sampling without replacement."""
        self._advance(shape)
        return self._gen.random(shape)


def gaussian_vector(rng: RngStream, dim: int) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return rng.normal(size=dim)


def window_norm(L) -> float:
    """|L| = tr(L L^T)^(1/2), i.e. the Frobenius norm."""
    L = np.asarray(L, dtype=float)
    scale = float(np.max(np.abs(L), initial=0.0))
    if scale == 0.0 or not np.isfinite(scale):
        return scale
    # scaled so tiny or huge entries neither underflow nor overflow
    return scale * float(np.sqrt(np.sum((L / scale) ** 2)))


def clamp_window(L, w_min: float, w_max: float) -> np.ndarray:
    """Radially rescale ``L`` so that ``w_min <= |L| / sqrt(D) <= w_max``."""
    if not 0.0 <= w_min <= w_max:
        raise ValueError(f"need 0 <= w_min <= w_max, got w_min={w_min}, w_max={w_max}")
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"L must be square, got shape {L.shape}")
    root_d = np.sqrt(L.shape[0])
    norm = window_norm(L)
    if norm == 0.0:
        if w_min > 0.0:
            raise ValueError("cannot clamp a zero window: direction is undefined")
        return L.copy()
    size = norm / root_d
    # a previous clamp may leave |L| a few ulps outside the band; treating
    # that as inside keeps clamp_window idempotent
    tol = 8 * np.finfo(float).eps
    if size > w_max * (1 + tol):
        target = w_max
    elif size < w_min * (1 - tol):
        target = w_min
    else:
        return L.copy()
    return L * (target * root_d / norm)


def sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def rotation2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def eig2_sym(A) -> tuple[float, float]:
    """Closed-form eigenvalues of a symmetric 2x2 matrix, returned (larger, smaller)."""
    A = np.asarray(A, dtype=float)
    a, b, d = A[0, 0], 0.5 * (A[0, 1] + A[1, 0]), A[1, 1]
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), b)
    return float(mean + rad), float(mean - rad)
