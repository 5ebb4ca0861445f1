"""Smoothing-based optimizers: DAS, DIS, fixed-window ball smoothing and SPSA.

Every optimizer maximises a :class:`~anisotune.objectives.NoisyObjective`
under a hard budget of oracle calls and returns the final position together
with a :class:`BenchmarkTrace` holding one record per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import RngStream, clamp_window, window_norm
from .objectives import NoisyObjective
from .smoothing import GradEstimate, estimate_anisotropic, estimate_isotropic, estimate_sphere


class BudgetExhausted(RuntimeError):
    """Raised when a step is requested with no oracle calls left."""


def round_half_up(z: float) -> int:
    return int(math.floor(z + 0.5))


def random_start(dim: int, rng: RngStream) -> np.ndarray:
    """Initial position drawn uniformly from the unit box."""
    return rng.uniform(0.0, 1.0, size=dim)


@dataclass
class BenchmarkTrace:
    n_s: list = field(default_factory=list)
    x: list = field(default_factory=list)
    window_norm: list = field(default_factory=list)
    fitness: list = field(default_factory=list)
    final_L: Optional[np.ndarray] = None

    def append(self, n_s: int, x, wnorm: float, fitness: float) -> None:
        if self.n_s and n_s <= self.n_s[-1]:
            raise ValueError("trace sample counts must be strictly increasing")
        self.n_s.append(int(n_s))
        self.x.append(np.array(x, dtype=float))
        self.window_norm.append(float(wnorm))
        self.fitness.append(float(fitness))

    def __len__(self) -> int:
        return len(self.n_s)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.array(self.n_s), np.array(self.window_norm), np.array(self.fitness)

    def fitness_at(self, n_s: int) -> float:
        """Fitness of the last record taken with at most ``n_s`` samples."""
        idx = np.searchsorted(self.n_s, n_s, side="right") - 1
        if idx < 0:
            raise ValueError(f"no record at or before n_s={n_s}")
        return self.fitness[idx]

    def best(self) -> tuple[int, float]:
        i = int(np.nanargmax(self.fitness))
        return self.n_s[i], self.fitness[i]


@dataclass
class WindowState:
    x: np.ndarray
    L: np.ndarray
    step_index: int = 0
    samples_used: int = 0


@dataclass
class DasConfig:
    budget: int
    x0: np.ndarray
    B0: Optional[float] = None  # defaults to 10 * D
    batch_exp: float = 0.5
    dt: float = 0.5
    alpha_L: Optional[float] = None  # defaults to 1 / D
    alpha_x: float = 1.0
    growth: float = 0.0
    w_min: float = 0.0
    w_max: float = 2.0
    w_init: float = 1.0
    clamp: bool = True

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        d = self.x0.shape[0]
        if self.B0 is None:
            self.B0 = 10.0 * d
        if self.alpha_L is None:
            self.alpha_L = 1.0 / d
        _check_window_bounds(self)
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.batch_exp < 0 or self.growth < 0:
            raise ValueError("batch_exp and growth must be >= 0")


@dataclass
class DisConfig:
    budget: int
    x0: np.ndarray
    B0: Optional[float] = None
    batch_exp: float = 0.5
    dt: float = 0.5
    alpha_w: Optional[float] = None
    alpha_x: float = 1.0
    growth: float = 0.0
    w_min: float = 0.0
    w_max: float = 2.0
    w_init: float = 1.0

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        d = self.x0.shape[0]
        if self.B0 is None:
            self.B0 = 10.0 * d
        if self.alpha_w is None:
            self.alpha_w = 1.0 / d
        _check_window_bounds(self)
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")


FIXED_KERNELS = ("gaussian", "sphere")


@dataclass
class FixedWindowConfig:
    budget: int
    x0: np.ndarray
    w: float = 0.25
    eta: Optional[float] = None  # defaults to 1 / D
    B: Optional[int] = None  # defaults to 10 * D
    # "gaussian": L = w I Gaussian window; "sphere": samples on the radius-w sphere
    kernel: str = "gaussian"

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        d = self.x0.shape[0]
        if self.kernel not in FIXED_KERNELS:
            raise ValueError(f"kernel must be one of {FIXED_KERNELS}, got {self.kernel!r}")
        if self.eta is None:
            self.eta = 1.0 / d
        if self.B is None:
            self.B = 10 * d
        if self.w <= 0 or self.eta <= 0 or self.B < 1 or self.budget < 1:
            raise ValueError("fixed-window config needs w, eta > 0 and B, budget >= 1")


@dataclass
class SpsaConfig:
    budget: int
    x0: np.ndarray
    a: float = 0.5
    c: float = 0.1
    A: float = 10.0
    alpha_gain: float = 0.602
    gamma_gain: float = 0.101

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        if min(self.a, self.c, self.A, self.alpha_gain, self.gamma_gain) <= 0:
            raise ValueError("SPSA gains and exponents must be > 0")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")

    def gains(self, k: int) -> tuple[float, float]:
        a_k = self.a / (k + 1 + self.A) ** self.alpha_gain
        c_k = self.c / (k + 1) ** self.gamma_gain
        return a_k, c_k


def _check_window_bounds(cfg) -> None:
    if not 0.0 <= cfg.w_min <= cfg.w_init <= cfg.w_max:
        raise ValueError(
            f"need 0 <= w_min <= w_init <= w_max, got {cfg.w_min}, {cfg.w_init}, {cfg.w_max}"
        )


def batch_size(B0: float, L, batch_exp: float, remaining: int) -> int:
    """``B0 / tr(L L^T)^(batch_exp/2)``, rounded half up, floored at 1, capped at ``remaining``."""
    size = B0 / window_norm(L) ** batch_exp
    return max(1, min(round_half_up(size), remaining))


def das_direction(L, est: GradEstimate, alpha_L: float, alpha_x: float, growth: float):
    """Preconditioned drifts ``(dL, dx)`` for one DAS step."""
    L = np.asarray(L, dtype=float)
    dL = alpha_L * (L @ est.gL + growth * L)
    dx = alpha_x * (L @ est.gx)
    return dL, dx


def two_step_dt(dt: float, L, L_hat) -> float:
    return dt * math.sqrt(window_norm(L_hat) / window_norm(L))


def das_step(
    state: WindowState, cfg: DasConfig, obj: NoisyObjective, rng: RngStream
) -> WindowState:
    remaining = cfg.budget - state.samples_used
    if remaining < 1:
        raise BudgetExhausted(f"budget of {cfg.budget} samples is spent")
    L, x = state.L, state.x
    B = batch_size(cfg.B0, L, cfg.batch_exp, remaining)
    est = estimate_anisotropic(obj, x, L, B, rng)
    dL, dx = das_direction(L, est, cfg.alpha_L, cfg.alpha_x, cfg.growth)
    dt_hat = two_step_dt(cfg.dt, L, L + cfg.dt * dL)
    L_new = L + dt_hat * dL
    x_new = x + dt_hat * dx
    if not (np.all(np.isfinite(L_new)) and np.all(np.isfinite(x_new))):
        raise FloatingPointError(f"DAS diverged at step {state.step_index}; reduce dt or raise B0")
    if cfg.clamp:
        L_new = clamp_window(L_new, cfg.w_min, cfg.w_max)
    return WindowState(x_new, L_new, state.step_index + 1, state.samples_used + B)


def _record(trace: BenchmarkTrace, obj: NoisyObjective, state_n: int, x, wnorm: float) -> None:
    trace.append(state_n, x, wnorm, obj.fitness(x))


def das_run(cfg: DasConfig, obj: NoisyObjective, rng: RngStream, L0=None, on_step=None):
    """Run DAS until the budget is spent; returns ``(x_final, trace)``.

    ``L0`` overrides the isotropic initial window ``w_init * I``; ``on_step``
    is called with every new :class:`WindowState`.
    """
    d = cfg.x0.shape[0]
    L = cfg.w_init * np.eye(d) if L0 is None else np.array(L0, dtype=float)
    state = WindowState(cfg.x0.copy(), L)
    trace = BenchmarkTrace()
    while state.samples_used < cfg.budget:
        state = das_step(state, cfg, obj, rng.child("step", state.step_index))
        if on_step is not None:
            on_step(state)
        _record(trace, obj, state.samples_used, state.x, window_norm(state.L))
    trace.final_L = state.L
    return state.x, trace


def dis_step(x, w: float, samples_used: int, cfg: DisConfig, obj: NoisyObjective, rng: RngStream):
    remaining = cfg.budget - samples_used
    if remaining < 1:
        raise BudgetExhausted(f"budget of {cfg.budget} samples is spent")
    d = x.shape[0]
    B = max(1, min(round_half_up(cfg.B0 / (w * math.sqrt(d)) ** cfg.batch_exp), remaining))
    est = estimate_isotropic(obj, x, w, B, rng)
    dw = cfg.alpha_w * (w * w * est.hw + cfg.growth * w)
    dx = cfg.alpha_x * w * w * est.hx
    w_hat = w + cfg.dt * dw
    dt_hat = cfg.dt * math.sqrt(abs(w_hat) / w)
    # the kernel is symmetric, so a window pushed through zero is the same window
    w_new = abs(w + dt_hat * dw)
    w_new = min(max(w_new, cfg.w_min), cfg.w_max)
    return x + dt_hat * dx, w_new, samples_used + B


def dis_run(cfg: DisConfig, obj: NoisyObjective, rng: RngStream):
    d = cfg.x0.shape[0]
    x, w, used, k = cfg.x0.copy(), float(cfg.w_init), 0, 0
    trace = BenchmarkTrace()
    while used < cfg.budget:
        x, w, used = dis_step(x, w, used, cfg, obj, rng.child("step", k))
        k += 1
        _record(trace, obj, used, x, w * math.sqrt(d))
        if w == 0.0:
            break
    return x, trace


def fixed_window_run(cfg: FixedWindowConfig, obj: NoisyObjective, rng: RngStream):
    d = cfg.x0.shape[0]
    L = cfg.w * np.eye(d)
    x, used, k = cfg.x0.copy(), 0, 0
    trace = BenchmarkTrace()
    while used < cfg.budget:
        B = min(cfg.B, cfg.budget - used)
        if cfg.kernel == "sphere":
            g = estimate_sphere(obj, x, cfg.w, B, rng.child("step", k))
        else:
            g = estimate_anisotropic(obj, x, L, B, rng.child("step", k)).gx
        x = x + cfg.eta * cfg.w * g
        used += B
        k += 1
        _record(trace, obj, used, x, window_norm(L))
    return x, trace


def spsa_run(cfg: SpsaConfig, obj: NoisyObjective, rng: RngStream):
    d = cfg.x0.shape[0]
    x, used, k = cfg.x0.copy(), 0, 0
    trace = BenchmarkTrace()
    while cfg.budget - used >= 2:
        a_k, c_k = cfg.gains(k)
        step = rng.child("step", k)
        delta = step.child("perturbation").rademacher(d)
        y = obj.observe_batch(np.stack([x + c_k * delta, x - c_k * delta]), step.child("oracle"))
        g = delta * (y[0] - y[1]) / (2.0 * c_k)
        x = x + a_k * g
        used += 2
        k += 1
        _record(trace, obj, used, x, c_k * math.sqrt(d))
    return x, trace


ALGORITHMS = ("das", "dis", "fixed-window", "spsa")
