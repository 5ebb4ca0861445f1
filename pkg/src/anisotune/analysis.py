"""Gradient-estimation error near an optimum, kernel/Hessian alignment and
window-shape convergence experiments.

Notation: ``P = L L^T`` is the window covariance, ``H`` the Hessian of ``f``
at its maximum and ``f_max = f(x_bar)``. The error formulas expand
``f(x_bar + u) ~ f_max - u^T Q u`` with the curvature matrix ``Q = -H / 2``
and write ``M = L^T Q L``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import RngStream, eig2_sym, rotation2, window_norm
from .objectives import gaussian_objective, make_objective
from .optimizers import BenchmarkTrace, DasConfig, das_run


@dataclass
class VarianceReport:
    per_coordinate: np.ndarray
    total: float
    n_s: int
    mode: str  # "exact", "approximate" or "empirical"


def nu(j: int, k: int, l: int) -> int:
    distinct = len({j, k, l})
    return {1: 15, 2: 2, 3: 1}[distinct]


def _nu_tensor(d: int) -> np.ndarray:
    out = np.empty((d, d, d))
    for j, k, l in itertools.product(range(d), repeat=3):
        out[j, k, l] = nu(j, k, l)
    return out


def _curvature_terms(L, H):
    L = np.asarray(L, dtype=float)
    H = np.asarray(H, dtype=float)
    if not np.allclose(H, H.T):
        raise ValueError("Hessian must be symmetric")
    Q = -0.5 * H
    return L, L @ L.T, L.T @ Q @ L


def eta_x_variance_exact(L, H, f_max: float, n_s: int) -> VarianceReport:
    """Four-term variance of each coordinate of the preconditioned x-step.

    ``Var_i = (P_ii f^2 + sum_jkl L_ij^2 M_kl^2 nu_jkl - 2 f P_ii tr M
    - 4 f (L M L^T)_ii) / n_s`` with ``nu`` = 15 / 2 / 1 for three / two / no
    equal indices.
    """
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    L, P, M = _curvature_terms(L, H)
    d = L.shape[0]
    first = np.diag(P) * f_max**2
    second = np.einsum("ij,kl,jkl->i", L**2, M**2, _nu_tensor(d))
    third = -2.0 * f_max * np.diag(P) * np.trace(M)
    fourth = -4.0 * f_max * np.diag(L @ M @ L.T)
    per = (first + second + third + fourth) / n_s
    return VarianceReport(per, float(per.sum()), n_s, "exact")


def eta_x_variance_approx(L, H, f_max: float, n_s: int) -> VarianceReport:
    """Trace-form approximation ``tr P (f^2 + (tr M)^2 - 6 f tr M) / n_s``.

    Only the total is defined by the approximation; it is split across
    coordinates in proportion to ``P_ii``.
    """
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    L, P, M = _curvature_terms(L, H)
    trM = np.trace(M)
    per = np.diag(P) * (f_max**2 + trM**2 - 6.0 * f_max * trM) / n_s
    return VarianceReport(per, float(per.sum()), n_s, "approximate")


def empirical_gradient_error(
    f, x_bar, L, B: int, reps: int, rng: RngStream, chunk: int = 2_000_000
) -> VarianceReport:
    """Sample variance of ``L @ mean_b(v_b f(x_bar + L v_b))`` over ``reps`` batches of size ``B``."""
    if reps < 2:
        raise ValueError("need reps >= 2 for a sample variance")
    if B < 1:
        raise ValueError("B must be >= 1")
    x_bar = np.asarray(x_bar, dtype=float)
    L = np.asarray(L, dtype=float)
    d = x_bar.shape[0]
    per_chunk = max(1, chunk // (B * d))
    steps = []
    for c, start in enumerate(range(0, reps, per_chunk)):
        n = min(per_chunk, reps - start)
        v = rng.child("chunk", c).normal(size=(n, B, d))
        y = np.asarray(f(x_bar + v @ L.T), dtype=float)
        steps.append(np.einsum("rbd,rb->rd", v, y) @ L.T / B)
    dx = np.concatenate(steps)
    per = dx.var(axis=0, ddof=1)
    return VarianceReport(per, float(per.sum()), B, "empirical")


@dataclass
class AlignmentCurve:
    theta: np.ndarray
    exact: np.ndarray
    approx: np.ndarray
    empirical: np.ndarray | None

    def argmin_exact(self) -> float:
        return float(self.theta[int(np.argmin(self.exact))])

    def rows(self):
        emp = self.empirical if self.empirical is not None else np.full_like(self.exact, np.nan)
        return zip(self.theta, self.exact, self.approx, emp)


def aligned_gaussian(hessian_eigs, theta0: float):
    """``(M, precision)`` of a 2-D Gaussian whose precision has the given
    eigenvalues along axes rotated by ``theta0``."""
    R = rotation2(theta0)
    h = np.asarray(hessian_eigs, dtype=float)
    precision = R @ np.diag(h) @ R.T
    M = np.diag(np.sqrt(h)) @ R.T  # M^T M = precision
    return M, precision


def kernel_shape(kernel_eigs, theta: float) -> np.ndarray:
    """``L`` with ``L L^T`` having eigenvalues ``kernel_eigs`` along axes rotated by ``theta``."""
    return rotation2(theta) @ np.diag(np.sqrt(np.asarray(kernel_eigs, dtype=float)))


def alignment_scan(
    thetas,
    hessian_eigs=(1.0, 4.0),
    kernel_eigs=(0.01, 0.04),
    theta0: float = 0.0,
    n_s: int = 100,
    draws: int = 1_000_000,
    rng: RngStream | None = None,
) -> AlignmentCurve:
    """Gradient-error total ``E(theta)`` for a Gaussian objective in D=2.

    The objective has precision eigenvalues ``hessian_eigs`` (curvature
    magnitudes; the peak is a maximum) rotated by ``theta0``; the window has
    ``L L^T`` eigenvalues ``kernel_eigs`` rotated by ``theta``. Exact and
    approximate curves come from the closed forms at batch size ``n_s``;
    the empirical curve, when ``rng`` is given, from ``draws`` single-sample
    replicates per angle rescaled by ``1 / n_s``.
    """
    thetas = np.asarray(thetas, dtype=float)
    M, precision = aligned_gaussian(hessian_eigs, theta0)
    center = np.zeros(2)
    f_max = 1.0 / (2.0 * np.pi)
    H = -f_max * precision
    exact, approx, emp = [], [], []
    for i, th in enumerate(thetas):
        L = kernel_shape(kernel_eigs, th)
        exact.append(eta_x_variance_exact(L, H, f_max, n_s).total)
        approx.append(eta_x_variance_approx(L, H, f_max, n_s).total)
        if rng is not None:
            f = lambda x: gaussian_objective(x, M, center)  # noqa: E731
            # single-draw replicates: same draw count, far lower variance-of-variance
            rep = empirical_gradient_error(f, center, L, 1, draws, rng.child("theta", i))
            emp.append(rep.total / n_s)
    return AlignmentCurve(thetas, np.array(exact), np.array(approx), np.array(emp) if rng is not None else None)


def kernel_eigenratio(L) -> float:
    """Ratio (larger / smaller) of the eigenvalues of ``(L L^T)^{-1}`` in D=2."""
    big, small = eig2_sym(np.asarray(L) @ np.asarray(L).T)
    return big / small


@dataclass
class EigenratioTrace:
    n_s: np.ndarray
    ratio: np.ndarray
    window_norm: np.ndarray
    target: float

    def tail_ratio(self, fraction: float = 0.2) -> float:
        """Geometric mean of the ratio over the last ``fraction`` of samples."""
        cut = self.n_s[-1] * (1.0 - fraction)
        tail = self.ratio[self.n_s >= cut]
        return float(np.exp(np.mean(np.log(tail))))


def eigenratio_trace(
    hessian_ratio: float,
    rng: RngStream,
    budget: int = 100_000,
    growth: float = 0.01,
    theta0: float = np.pi / 6,
    curvature: float = 1.0,
    B0: float = 100.0,
    **das_kwargs,
) -> EigenratioTrace:
    """Run DAS with a growth term on a 2-D Gaussian and record the
    eigenvalue ratio of the kernel curvature ``(L L^T)^{-1}`` after each step.

    At the fixed point ``L L^T`` is proportional to the objective's
    covariance, so the ratio should approach ``hessian_ratio``. The ratio is
    biased upward by estimator noise, hence the larger default ``B0``.
    """
    M, _ = aligned_gaussian((curvature * hessian_ratio, curvature), theta0)
    obj = make_objective("gaussian", 2, M=M, center=np.zeros(2))
    x0 = rng.child("x0").uniform(-0.5, 0.5, size=2)
    cfg = DasConfig(budget=budget, x0=x0, growth=growth, B0=B0, **das_kwargs)
    ratios, norms, ns = [], [], []

    def collect(state):
        ratios.append(kernel_eigenratio(state.L))
        norms.append(window_norm(state.L))
        ns.append(state.samples_used)

    das_run(cfg, obj, rng.child("run"), on_step=collect)
    return EigenratioTrace(np.array(ns), np.array(ratios), np.array(norms), float(hessian_ratio))


def fit_convergence(trace: BenchmarkTrace, dim: int = 1, f_opt: float = 1.0) -> tuple[float, float]:
    """Least-squares fit of ``log(eps / dim) = log c + slope * log n_s`` over the final decade.

    ``eps = f_opt - fitness``; non-positive errors are dropped.
    """
    n, _, fit = trace.arrays()
    eps = f_opt - fit
    keep = (n >= n[-1] / 10.0) & (eps > 0) & np.isfinite(eps)
    if keep.sum() < 10:
        raise ValueError(f"need at least 10 usable records in the final decade, got {int(keep.sum())}")
    slope, intercept = np.polyfit(np.log(n[keep]), np.log(eps[keep] / dim), 1)
    return float(np.exp(intercept)), float(slope)


def average_trace(traces, grid) -> BenchmarkTrace:
    """Mean fitness of several runs sampled at the sample counts in ``grid``."""
    out = BenchmarkTrace()
    for n in grid:
        vals = [t.fitness_at(int(n)) for t in traces]
        wn = [t.window_norm[max(0, int(np.searchsorted(t.n_s, n, side="right")) - 1)] for t in traces]
        out.append(int(n), np.full(1, np.nan), float(np.mean(wn)), float(np.mean(vals)))
    return out
