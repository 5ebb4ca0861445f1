"""Chaotic-amplitude-control heuristics for Ising (SK) and random 3-SAT, and
the noisy tuning objectives built on top of them.

Both solvers integrate, with an explicit Euler step ``dt`` for ``T`` steps::

    dx_i = x_i (p - 1 - x_i^2) - e_i * coupling_i(x)
    de_i = beta * e_i * (1 - x_i^2)

where ``p`` moves linearly from ``p_init`` to ``p_end``. For Ising the
coupling is ``sum_j J_ij x_j``; for SAT it is ``sum_j K_ij`` over clauses.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import RngStream
from .objectives import NoiseModel, NoisyObjective

INIT_AMPLITUDE = 0.1


@dataclass
class IsingInstance:
    J: np.ndarray

    @property
    def N(self) -> int:
        return self.J.shape[0]


@dataclass
class SatInstance:
    """3-SAT instance. ``clauses[j]`` holds signed 0-based literals.

    ``var[j, k]`` is the k-th variable of clause j and ``sign[j, k]`` is +1 for
    a plain and -1 for a negated occurrence (the sparse matrix ``C``).
    """

    N: int
    var: np.ndarray
    sign: np.ndarray

    @property
    def M(self) -> int:
        return self.var.shape[0]

    def clause_matrix(self) -> np.ndarray:
        C = np.zeros((self.N, self.M))
        for k in range(self.var.shape[1]):
            C[self.var[:, k], np.arange(self.M)] = self.sign[:, k]
        return C

    def violated(self, assignment) -> int:
        """Number of clauses not satisfied by a +-1 assignment."""
        s = np.asarray(assignment)
        lit_true = s[self.var] * self.sign > 0
        return int(np.sum(~np.any(lit_true, axis=1)))

    def satisfied_by(self, assignment) -> bool:
        return self.violated(assignment) == 0


@dataclass
class CacParams:
    dt: float = 0.1
    p_init: float = -1.0
    p_end: float = 1.0
    beta: float = 0.3
    T: int = 200

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")

    @classmethod
    def from_vector(cls, theta, T: int) -> "CacParams":
        dt, p_init, p_end, beta = (float(t) for t in theta)
        return cls(dt, p_init, p_end, beta, T)

    def valid(self) -> bool:
        vals = (self.dt, self.p_init, self.p_end, self.beta)
        return self.dt > 0 and all(math.isfinite(v) for v in vals)

    def p_at(self, t: int) -> float:
        return self.p_init + (self.p_end - self.p_init) * (t / self.T)


@dataclass
class TrajectoryResult:
    steps_run: int
    best_energy: float = math.inf
    satisfied: bool = False
    first_success_step: Optional[int] = None
    failed: bool = False


# -- instances ---------------------------------------------------------------


def generate_sk(N: int, rng: RngStream) -> IsingInstance:
    if N < 2:
        raise ValueError("SK instance needs N >= 2")
    upper = np.triu(rng.normal(size=(N, N)), k=1)
    return IsingInstance(upper + upper.T)


def generate_random_3sat(N: int, alpha: float, rng: RngStream) -> SatInstance:
    if N < 3:
        raise ValueError("random 3-SAT needs N >= 3")
    M = int(math.floor(alpha * N + 0.5))
    # three distinct variables per clause: smallest three of M random key rows
    keys = rng.argsort_keys((M, N))
    var = np.argpartition(keys, 3, axis=1)[:, :3] if N > 3 else np.tile(np.arange(3), (M, 1))
    var = np.sort(var, axis=1)
    sign = rng.rademacher((M, 3)).astype(np.int64)
    return SatInstance(N, var.astype(np.int64), sign)


def ising_energy(inst: IsingInstance, sigma) -> float:
    s = np.asarray(sigma, dtype=float)
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("spins must be +-1")
    return float(0.5 * s @ inst.J @ s)


def sk_energy_threshold(N: int) -> float:
    """Approximate average SK ground-state energy N^(3/2) (-0.761 + 0.7 N^(-2/3))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return N**1.5 * (-0.761 + 0.7 * N ** (-2.0 / 3.0))


def binarize(x) -> np.ndarray:
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def brute_force_ground_state(inst: IsingInstance) -> tuple[float, np.ndarray]:
    """Exhaustive minimum of the Ising energy (spin 0 pinned to +1)."""
    N = inst.N
    if N > 22:
        raise ValueError("exhaustive search is limited to N <= 22")
    codes = np.arange(2 ** (N - 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(N - 1)) & 1
    S = np.hstack([np.ones((codes.size, 1)), 2.0 * bits - 1.0])
    E = 0.5 * np.einsum("bi,ij,bj->b", S, inst.J, S)
    i = int(np.argmin(E))
    return float(E[i]), S[i]


def brute_force_satisfiable(inst: SatInstance) -> Optional[np.ndarray]:
    """A satisfying +-1 assignment, or None. Exhaustive, so N <= 24."""
    N = inst.N
    if N > 24:
        raise ValueError("exhaustive search is limited to N <= 24")
    chunk = 1 << 16
    for start in range(0, 1 << N, chunk):
        codes = np.arange(start, min(start + chunk, 1 << N), dtype=np.int64)
        S = 2 * ((codes[:, None] >> np.arange(N)) & 1) - 1
        lit_true = S[:, inst.var] * inst.sign > 0
        ok = np.all(np.any(lit_true, axis=2), axis=1)
        if ok.any():
            return S[int(np.argmax(ok))].astype(float)
    return None


# -- clause terms -------------------------------------------------------------


def sat_terms(inst: SatInstance, x) -> tuple[np.ndarray, np.ndarray]:
    """Clause terms ``K_j`` (shape M) and partials ``K_ij`` (shape M x 3).

    ``K_partials[j, k]`` belongs to variable ``inst.var[j, k]``.
    """
    x = np.asarray(x, dtype=float)
    F = 0.5 * (1.0 - inst.sign * x[inst.var])
    K = np.prod(F, axis=1)
    others = np.stack([F[:, 1] * F[:, 2], F[:, 0] * F[:, 2], F[:, 0] * F[:, 1]], axis=1)
    return K, -0.5 * inst.sign * others


def sat_coupling(inst: SatInstance, x) -> np.ndarray:
    """``sum_j K_ij`` for every variable i."""
    _, Kp = sat_terms(inst, x)
    return np.bincount(inst.var.ravel(), weights=Kp.ravel(), minlength=inst.N)


# -- trajectories ---------------------------------------------------------------


def _initial_state(N: int, rng: RngStream):
    return INIT_AMPLITUDE * rng.normal(size=N), np.ones(N)


def cim_cac_trajectory(
    inst: IsingInstance, params: CacParams, rng: RngStream, x0=None
) -> TrajectoryResult:
    if not params.valid():
        return TrajectoryResult(0, failed=True)
    J = inst.J
    if x0 is None:
        x, e = _initial_state(inst.N, rng)
    else:
        x, e = np.array(x0, dtype=float), np.ones(inst.N)
    best = math.inf
    dt, beta = params.dt, params.beta
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(params.T):
            p = params.p_at(t)
            x2 = x * x
            x, e = x + dt * (x * (p - 1.0 - x2) - e * (J @ x)), e + dt * beta * e * (1.0 - x2)
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(e))):
                return TrajectoryResult(t + 1, best_energy=math.inf, failed=True)
            s = binarize(x)
            best = min(best, 0.5 * float(s @ J @ s))
    return TrajectoryResult(params.T, best_energy=best)


def sat_cac_trajectory(
    inst: SatInstance,
    params: CacParams,
    rng: RngStream,
    x0=None,
    success_at: str = "any",
) -> TrajectoryResult:
    """Integrate SAT-CAC for the full ``T`` steps.

    ``success_at="any"`` reports success if any step's binarised state
    satisfies every clause; ``"final"`` checks only the last step.
    """
    if success_at not in ("any", "final"):
        raise ValueError("success_at must be 'any' or 'final'")
    if not params.valid():
        return TrajectoryResult(0, failed=True)
    if x0 is None:
        x, e = _initial_state(inst.N, rng)
    else:
        x, e = np.array(x0, dtype=float), np.ones(inst.N)
    first = None
    if success_at == "any" and inst.satisfied_by(binarize(x)):
        first = 0
    dt, beta = params.dt, params.beta
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(params.T):
            p = params.p_at(t)
            x2 = x * x
            x, e = (
                x + dt * (x * (p - 1.0 - x2) - e * sat_coupling(inst, x)),
                e + dt * beta * e * (1.0 - x2),
            )
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(e))):
                return TrajectoryResult(t + 1, failed=True)
            if success_at == "any" and first is None and inst.satisfied_by(binarize(x)):
                first = t + 1
    if success_at == "final":
        first = params.T if inst.satisfied_by(binarize(x)) else None
    return TrajectoryResult(params.T, satisfied=first is not None, first_success_step=first)


def soft_success_sample(best_energy: float, beta_E: float, E_thresh: float) -> float:
    """Boltzmann-weighted success ``exp(-beta_E (E - E_thresh))``; 0 for failed runs."""
    if beta_E < 0:
        raise ValueError("beta_E must be >= 0")
    if not math.isfinite(best_energy):
        return 0.0
    if beta_E == 0:
        return 1.0
    return math.exp(-beta_E * (best_energy - E_thresh))


# -- batched SAT integration (tuning hot path) -----------------------------------


def _sat_batch_success(instances, params_list, x0s, success_at="any") -> np.ndarray:
    """Vectorised SAT-CAC over independent (instance, params, x0) triples.

    Every element follows exactly the arithmetic of :func:`sat_cac_trajectory`;
    per-variable sums use bincount so each element accumulates its clauses in
    the same order as the single-trajectory path.
    """
    n = len(instances)
    N = instances[0].N
    T = params_list[0].T
    if any(inst.N != N for inst in instances) or any(p.T != T for p in params_list):
        raise ValueError("batched instances must share N and T")
    var = np.stack([inst.var for inst in instances])  # (n, M, 3)
    sign = np.stack([inst.sign for inst in instances]).astype(float)
    flat_var = (var + (np.arange(n) * N)[:, None, None]).ravel()
    dt = np.array([p.dt for p in params_list])[:, None]
    beta = np.array([p.beta for p in params_list])[:, None]
    p0 = np.array([p.p_init for p in params_list])[:, None]
    p1 = np.array([p.p_end for p in params_list])[:, None]
    x = np.array(x0s, dtype=float)
    e = np.ones_like(x)
    alive = np.ones(n, dtype=bool)
    success = np.zeros(n, dtype=bool)
    rows = np.arange(n)[:, None, None]

    def check(x):
        lit = np.where(x >= 0, 1.0, -1.0)[rows, var] * sign > 0
        return np.all(np.any(lit, axis=2), axis=1)

    if success_at == "any":
        success |= check(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(T):
            p = p0 + (p1 - p0) * (t / T)
            F = 0.5 * (1.0 - sign * x[rows, var])
            others = np.stack(
                [F[..., 1] * F[..., 2], F[..., 0] * F[..., 2], F[..., 0] * F[..., 1]], axis=-1
            )
            Kp = -0.5 * sign * others
            coupling = np.bincount(flat_var, weights=Kp.ravel(), minlength=n * N).reshape(n, N)
            x2 = x * x
            x, e = x + dt * (x * (p - 1.0 - x2) - e * coupling), e + dt * beta * e * (1.0 - x2)
            finite = np.all(np.isfinite(x), axis=1) & np.all(np.isfinite(e), axis=1)
            alive &= finite
            x[~alive] = 0.0
            e[~alive] = 0.0
            if success_at == "any":
                success |= check(x) & alive
    if success_at == "final":
        success = check(x) & alive
    return success & alive


# -- tuning objectives -------------------------------------------------------------


@dataclass
class ProblemSpec:
    kind: str  # "sat" or "ising"
    N: int
    T: int
    alpha: float = 4.0
    beta_E: float = 0.01
    E_thresh: Optional[float] = None
    success_at: str = "any"
    # fixed clause list overriding the random generator (used for smoke tests)
    fixed_clauses: Optional[list] = None

    def __post_init__(self):
        if self.kind not in ("sat", "ising"):
            raise ValueError(f"problem kind must be 'sat' or 'ising', got {self.kind!r}")
        if self.kind == "ising" and self.E_thresh is None:
            self.E_thresh = sk_energy_threshold(self.N)

    def instance(self, rng: RngStream):
        if self.kind == "ising":
            return generate_sk(self.N, rng)
        if self.fixed_clauses is not None:
            return sat_from_clauses(self.N, self.fixed_clauses)
        return generate_random_3sat(self.N, self.alpha, rng)


def tuning_oracle(problem: ProblemSpec, theta, rng: RngStream) -> float:
    """One noisy fitness sample: a fresh instance and a single trajectory."""
    params = CacParams.from_vector(theta, problem.T)
    if not params.valid():
        return 0.0
    inst = problem.instance(rng.child("instance"))
    traj_rng = rng.child("trajectory")
    if problem.kind == "sat":
        res = sat_cac_trajectory(inst, params, traj_rng, success_at=problem.success_at)
        return 0.0 if res.failed else float(res.satisfied)
    res = cim_cac_trajectory(inst, params, traj_rng)
    if res.failed:
        return 0.0
    return soft_success_sample(res.best_energy, problem.beta_E, problem.E_thresh)


def tuning_batch(problem: ProblemSpec, thetas, rngs) -> np.ndarray:
    """:func:`tuning_oracle` for many points; SAT runs are integrated together."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    out = np.zeros(len(thetas))
    if problem.kind != "sat":
        for i, (theta, r) in enumerate(zip(thetas, rngs)):
            out[i] = tuning_oracle(problem, theta, r)
        return out
    idx, insts, params, x0s = [], [], [], []
    for i, (theta, r) in enumerate(zip(thetas, rngs)):
        p = CacParams.from_vector(theta, problem.T)
        if not p.valid():
            continue
        inst = problem.instance(r.child("instance"))
        x0, _ = _initial_state(inst.N, r.child("trajectory"))
        idx.append(i)
        insts.append(inst)
        params.append(p)
        x0s.append(x0)
    if idx:
        out[idx] = _sat_batch_success(insts, params, x0s, problem.success_at).astype(float)
    return out


class TuningObjective(NoisyObjective):
    """Noisy objective over CAC parameter vectors ``(dt, p_init, p_end, beta)``.

    Sample ``i`` of a batch draws its instance and initial state from
    ``rng.child(i)``, so results do not depend on evaluation order.
    """

    def __init__(self, problem: ProblemSpec):
        super().__init__(true_f=None, dim=4, noise=NoiseModel(), f_opt=None, name=f"tune-{problem.kind}")
        self.problem = problem

    def observe(self, x, rng: RngStream) -> float:
        y = tuning_oracle(self.problem, np.asarray(x, dtype=float), rng.child(0))
        self._charge(1)
        return y

    def observe_batch(self, X, rng: RngStream) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self._check(X)
        y = tuning_batch(self.problem, X, [rng.child(i) for i in range(len(X))])
        self._charge(len(X))
        return y

    def fitness(self, x) -> float:
        # the true success rate is unknown; held-out evaluation is done separately
        return math.nan


def held_out_fitness(
    problem: ProblemSpec, theta, rng: RngStream, n_instances: int = 20, n_trajectories: int = 50
) -> float:
    """Mean fitness over ``n_instances`` fresh instances x ``n_trajectories`` runs each."""
    params = CacParams.from_vector(theta, problem.T)
    if not params.valid():
        return 0.0
    insts, x0s = [], []
    for a in range(n_instances):
        inst = problem.instance(rng.child("instance", a))
        for b in range(n_trajectories):
            insts.append(inst)
            x0s.append(_initial_state(inst.N, rng.child("trajectory", a, b))[0])
    if problem.kind == "sat":
        ok = _sat_batch_success(insts, [params] * len(insts), x0s, problem.success_at)
        return float(np.mean(ok))
    vals = []
    for inst, x0 in zip(insts, x0s):
        res = cim_cac_trajectory(inst, params, None, x0=x0)
        vals.append(0.0 if res.failed else soft_success_sample(res.best_energy, problem.beta_E, problem.E_thresh))
    return float(np.mean(vals))


# -- file formats -----------------------------------------------------------------


def sat_from_clauses(N: int, clauses) -> SatInstance:
    """Build from DIMACS-style 1-based signed literal triples."""
    lits = np.asarray(clauses, dtype=np.int64).reshape(-1, 3)
    if np.any(lits == 0) or np.any(np.abs(lits) > N):
        raise ValueError("literals must be non-zero and at most N in magnitude")
    var = np.abs(lits) - 1
    if np.any((var[:, 0] == var[:, 1]) | (var[:, 0] == var[:, 2]) | (var[:, 1] == var[:, 2])):
        raise ValueError("each clause needs three distinct variables")
    return SatInstance(N, var, np.sign(lits))


def write_dimacs(inst: SatInstance, path=None, comment: str = "") -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"c {line}\n")
    buf.write(f"p cnf {inst.N} {inst.M}\n")
    for v, s in zip(inst.var, inst.sign):
        buf.write(" ".join(str(int(si * (vi + 1))) for vi, si in zip(v, s)) + " 0\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_dimacs(source) -> SatInstance:
    """Parse DIMACS CNF text (or a path). Only 3-literal clauses are accepted."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        source = Path(source).read_text(encoding="utf-8")
    N = M = None
    tokens: list[int] = []
    for line in source.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            N, M = int(parts[2]), int(parts[3])
            continue
        tokens.extend(int(t) for t in line.split())
    if N is None:
        raise ValueError("missing 'p cnf' header")
    clauses, cur = [], []
    for t in tokens:
        if t == 0:
            if len(cur) != 3:
                raise ValueError(f"expected 3 literals per clause, got {len(cur)}")
            clauses.append(cur)
            cur = []
        else:
            cur.append(t)
    if cur:
        raise ValueError("last clause is not terminated by 0")
    if len(clauses) != M:
        raise ValueError(f"header declares {M} clauses, found {len(clauses)}")
    return sat_from_clauses(N, clauses)


def write_ising_triplets(inst: IsingInstance, path=None) -> str:
    """Upper-triangle couplings as ``i j J_ij`` lines, 1-indexed."""
    rows, cols = np.triu_indices(inst.N, k=1)
    text = "".join(f"{i + 1} {j + 1} {inst.J[i, j]:.17g}\n" for i, j in zip(rows, cols))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_ising_triplets(source, N: Optional[int] = None) -> IsingInstance:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        source = Path(source).read_text(encoding="utf-8")
    entries = [line.split() for line in source.splitlines() if line.strip()]
    n = N or max(max(int(a), int(b)) for a, b, _ in entries)
    J = np.zeros((n, n))
    for a, b, w in entries:
        i, j = int(a) - 1, int(b) - 1
        J[i, j] = J[j, i] = float(w)
    return IsingInstance(J)
