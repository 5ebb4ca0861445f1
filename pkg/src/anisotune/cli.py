"""``bench``: seeded experiment runner.

Usage::

    bench <kind> [--config file.json] [--seeds 1,2,3] [--budget n] [--out dir] [--jobs n]
    bench --list

A run writes one trace CSV per seed and a ``summary.json`` into the output
directory. Every file carries the fully resolved config, so rerunning from it
reproduces the file byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .analysis import AlignmentCurve, alignment_scan, average_trace, eigenratio_trace, fit_convergence
from .core import RngStream
from .cosolvers import ProblemSpec, TuningObjective, held_out_fitness
from .objectives import NoiseModel, make_objective
from .optimizers import (
    ALGORITHMS,
    BenchmarkTrace,
    DasConfig,
    DisConfig,
    FixedWindowConfig,
    SpsaConfig,
    das_run,
    dis_run,
    fixed_window_run,
    random_start,
    spsa_run,
)

KINDS = ("rosenbrock", "artificial", "tune-sat", "tune-ising", "alignment", "eigenratio", "convergence")

ALGO_CONFIGS = {
    "das": DasConfig,
    "dis": DisConfig,
    "fixed-window": FixedWindowConfig,
    "spsa": SpsaConfig,
}
RUNNERS = {"das": das_run, "dis": dis_run, "fixed-window": fixed_window_run, "spsa": spsa_run}

# Rosenbrock settings chosen on seeds 1-5 (D=2 and D=4); see README
ROSENBROCK_DAS = {"dt": 0.5, "B0": 2.0, "batch_exp": 1.0, "w_min": 0.05}

PROBLEM_DEFAULTS: dict[str, dict[str, Any]] = {
    "rosenbrock": {"D": 4, "beta": 0.5, "noise": "bernoulli", "sigma": 0.1},
    "artificial": {"objective": "asym-quad", "D": 5, "beta": 0.5, "noise": "gaussian", "sigma": 0.1},
    "tune-sat": {
        "N": 50,
        "alpha": 4.0,
        "T": 100,
        "success_at": "any",
        "held_out_instances": 20,
        "held_out_trajectories": 50,
        "checkpoints": 4,
    },
    "tune-ising": {
        "N": 50,
        "T": 100,
        "beta_E": 0.01,
        "E_thresh": None,
        "held_out_instances": 20,
        "held_out_trajectories": 50,
        "checkpoints": 4,
    },
    "alignment": {
        "hessian_eigs": [1.0, 4.0],
        "kernel_eigs": [0.01, 0.04],
        "theta0_deg": 0.0,
        "grid_step_deg": 5.0,
        "n_s": 100,
    },
    "eigenratio": {"hessian_ratio": 4.0, "theta0_deg": 30.0, "curvature": 1.0},
    "convergence": {"objective": "asym-quad", "D": 2, "noise": "gaussian", "sigma": 0.1},
}

# per-kind algorithm-block defaults layered under the user's block
ALGO_DEFAULTS: dict[tuple[str, str], dict[str, Any]] = {
    ("rosenbrock", "das"): ROSENBROCK_DAS,
    ("eigenratio", "das"): {"growth": 0.01, "B0": 100.0},
    ("convergence", "das"): {"batch_exp": 1.0},
}

BUDGET_DEFAULTS = {"tune-sat": 20_000, "tune-ising": 20_000, "alignment": 1_000_000}
FIXED_ALGORITHM = {"eigenratio": "das", "convergence": "das", "alignment": None}

TOP_KEYS = {"kind", "algorithm", "algo", "problem", "seeds", "budget", "out"}
PROBLEM_CHOICES = {
    "noise": ("none", "bernoulli", "gaussian"),
    "objective": ("mod-rosenbrock", "asym-quad", "sym-quad", "aniso-gauss"),
    "success_at": ("any", "final"),
}


class ConfigError(ValueError):
    """All validation problems found in a config, each prefixed with its path."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class ExperimentConfig:
    kind: str
    algorithm: str | None
    algo: dict = field(default_factory=dict)
    problem: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    budget: int = 100_000
    out: str = "runs"

    @property
    def dim(self) -> int:
        if self.kind in ("tune-sat", "tune-ising"):
            return 4
        if self.kind in ("alignment", "eigenratio"):
            return 2
        return int(self.problem["D"])

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# -- validation ----------------------------------------------------------------------


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_value(path: str, value, default, errors: list[str]) -> None:
    key = path.rsplit(".", 1)[-1]
    if key in PROBLEM_CHOICES and value not in PROBLEM_CHOICES[key]:
        errors.append(f"{path}: must be one of {list(PROBLEM_CHOICES[key])}, got {value!r}")
    elif isinstance(default, bool):
        if not isinstance(value, bool):
            errors.append(f"{path}: expected a boolean, got {value!r}")
    elif _is_int(default):
        if not _is_int(value) or value < 1:
            errors.append(f"{path}: expected a positive integer, got {value!r}")
    elif isinstance(default, float):
        if not _is_number(value):
            errors.append(f"{path}: expected a number, got {value!r}")
    elif isinstance(default, list):
        if not (isinstance(value, list) and len(value) == len(default) and all(_is_number(v) and v > 0 for v in value)):
            errors.append(f"{path}: expected {len(default)} positive numbers, got {value!r}")
    elif isinstance(default, str) and not isinstance(value, str):
        errors.append(f"{path}: expected a string, got {value!r}")


def _algo_fields(algorithm: str) -> dict[str, Any]:
    """Configurable fields of an algorithm with their declared defaults."""
    out = {}
    for f in dataclasses.fields(ALGO_CONFIGS[algorithm]):
        if f.name in ("budget", "x0"):
            continue
        out[f.name] = f.default
    return out


def _resolve_algo(kind: str, algorithm: str, block: dict, dim: int, errors: list[str]) -> dict:
    fields = _algo_fields(algorithm)
    resolved = dict(ALGO_DEFAULTS.get((kind, algorithm), {}))
    for key, value in block.items():
        path = f"algo.{key}"
        if key == "x0":
            if not (isinstance(value, list) and len(value) == dim and all(_is_number(v) for v in value)):
                errors.append(f"{path}: expected {dim} numbers, got {value!r}")
            else:
                resolved[key] = [float(v) for v in value]
            continue
        if key not in fields:
            errors.append(f"{path}: unknown key for algorithm {algorithm!r}")
            continue
        default = fields[key]
        if key == "kernel":
            if value not in ("gaussian", "sphere"):
                errors.append(f"{path}: must be 'gaussian' or 'sphere', got {value!r}")
                continue
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                errors.append(f"{path}: expected a boolean, got {value!r}")
                continue
        elif key == "B":
            if not _is_int(value) or value < 1:
                errors.append(f"{path}: expected a positive integer, got {value!r}")
                continue
        elif not _is_number(value):
            errors.append(f"{path}: expected a number, got {value!r}")
            continue
        resolved[key] = value
    # record the dimension-dependent defaults explicitly
    if algorithm in ("das", "dis"):
        resolved.setdefault("B0", 10.0 * dim)
    if algorithm == "das":
        resolved.setdefault("alpha_L", 1.0 / dim)
    if algorithm == "dis":
        resolved.setdefault("alpha_w", 1.0 / dim)
    if algorithm == "fixed-window":
        resolved.setdefault("eta", 1.0 / dim)
        resolved.setdefault("B", 10 * dim)
    for key, default in fields.items():
        resolved.setdefault(key, default)
    return resolved


def parse_config(text: str, kind: str | None = None) -> ExperimentConfig:
    """Validate a JSON config; raises :class:`ConfigError` listing every problem."""
    errors: list[str] = []
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError([f"$: invalid JSON ({exc.msg} at line {exc.lineno})"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["$: config must be a JSON object"])
    for key in raw:
        if key not in TOP_KEYS:
            errors.append(f"{key}: unknown key")

    cfg_kind = raw.get("kind", kind)
    if kind is not None and cfg_kind != kind:
        errors.append(f"kind: config says {cfg_kind!r} but command line says {kind!r}")
    if cfg_kind not in KINDS:
        errors.append(f"kind: must be one of {list(KINDS)}, got {cfg_kind!r}")
        raise ConfigError(errors)

    if cfg_kind in FIXED_ALGORITHM:
        algorithm = raw.get("algorithm", FIXED_ALGORITHM[cfg_kind])
        if algorithm != FIXED_ALGORITHM[cfg_kind]:
            errors.append(f"algorithm: kind {cfg_kind!r} only supports {FIXED_ALGORITHM[cfg_kind]!r}")
            algorithm = FIXED_ALGORITHM[cfg_kind]
    else:
        algorithm = raw.get("algorithm", "das")
        if algorithm not in ALGORITHMS:
            errors.append(f"algorithm: must be one of {list(ALGORITHMS)}, got {algorithm!r}")
            algorithm = "das"

    problem = dict(PROBLEM_DEFAULTS[cfg_kind])
    block = raw.get("problem", {})
    if not isinstance(block, dict):
        errors.append("problem: expected an object")
        block = {}
    for key, value in block.items():
        if key not in problem:
            errors.append(f"problem.{key}: unknown key for kind {cfg_kind!r}")
            continue
        if key == "E_thresh":
            if value is not None and not _is_number(value):
                errors.append(f"problem.E_thresh: expected a number or null, got {value!r}")
                continue
        else:
            _check_value(f"problem.{key}", value, problem[key], errors)
        problem[key] = value
    if cfg_kind in ("rosenbrock",) and _is_int(problem["D"]) and problem["D"] < 2:
        errors.append("problem.D: the Rosenbrock objective needs D >= 2")
    if problem.get("objective") == "aniso-gauss" and problem.get("D") != 2:
        errors.append("problem.D: aniso-gauss is defined for D = 2 only")
    if problem.get("objective") == "mod-rosenbrock" and _is_int(problem.get("D")) and problem["D"] < 2:
        errors.append("problem.D: the Rosenbrock objective needs D >= 2")

    budget = raw.get("budget", BUDGET_DEFAULTS.get(cfg_kind, 100_000))
    if not _is_int(budget) or budget < 1:
        errors.append("budget: budget must be >= 1")
        budget = 1
    seeds = raw.get("seeds", [1, 2, 3, 4, 5])
    if not isinstance(seeds, list) or not seeds:
        errors.append("seeds: expected a non-empty list of integers")
        seeds = [1]
    elif not all(_is_int(s) and s >= 0 for s in seeds):
        errors.append("seeds: every seed must be a non-negative integer")
    elif len(set(seeds)) != len(seeds):
        errors.append("seeds: duplicate seeds")
    out = raw.get("out", f"runs/{cfg_kind}")
    if not isinstance(out, str) or not out:
        errors.append("out: expected a path string")
        out = f"runs/{cfg_kind}"

    algo_block = raw.get("algo", {})
    if not isinstance(algo_block, dict):
        errors.append("algo: expected an object")
        algo_block = {}
    cfg = ExperimentConfig(cfg_kind, algorithm, {}, problem, list(seeds), int(budget), out)
    if algorithm is None:
        if algo_block:
            errors.append(f"algo: kind {cfg_kind!r} runs no optimizer")
    elif not any(e.startswith("problem.D") for e in errors):
        cfg.algo = _resolve_algo(cfg_kind, algorithm, algo_block, cfg.dim, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


# -- running ---------------------------------------------------------------------------


def _noise(problem: dict) -> NoiseModel:
    kind = problem.get("noise", "none")
    return NoiseModel(kind, float(problem.get("sigma", 0.0)) if kind == "gaussian" else 0.0)


def build_objective(cfg: ExperimentConfig):
    p = cfg.problem
    if cfg.kind == "rosenbrock":
        return make_objective("mod-rosenbrock", p["D"], _noise(p), beta=p["beta"])
    if cfg.kind in ("artificial", "convergence"):
        return make_objective(p["objective"], p["D"], _noise(p), beta=p.get("beta", 0.5))
    if cfg.kind in ("tune-sat", "tune-ising"):
        return TuningObjective(problem_spec(cfg))
    raise ValueError(f"kind {cfg.kind!r} has no single objective")


def problem_spec(cfg: ExperimentConfig) -> ProblemSpec:
    p = cfg.problem
    if cfg.kind == "tune-sat":
        return ProblemSpec("sat", N=p["N"], T=p["T"], alpha=p["alpha"], success_at=p["success_at"])
    return ProblemSpec("ising", N=p["N"], T=p["T"], beta_E=p["beta_E"], E_thresh=p["E_thresh"])


def run_optimizer(cfg: ExperimentConfig, seed: int, obj=None):
    """One seeded optimizer run: ``(x0, x_final, trace)``.

    ``x0`` comes from the ``"x0"`` child stream (uniform in the unit box unless
    configured) and the run from the ``"run"`` child.
    """
    rng = RngStream(seed)
    obj = build_objective(cfg) if obj is None else obj
    params = dict(cfg.algo)
    x0 = np.asarray(params.pop("x0")) if "x0" in params else random_start(cfg.dim, rng.child("x0"))
    algo_cfg = ALGO_CONFIGS[cfg.algorithm](budget=cfg.budget, x0=x0, **params)
    x, trace = RUNNERS[cfg.algorithm](algo_cfg, obj, rng.child("run"))
    return x0, x, trace


def checkpoint_grid(budget: int, count: int) -> list[int]:
    """``count`` roughly log-spaced sample counts ending at ``budget``."""
    pts = np.unique(np.round(np.geomspace(max(1.0, budget / 10 ** (count - 1)), budget, count)).astype(int))
    return [int(p) for p in pts]


def tuning_checkpoints(cfg: ExperimentConfig, seed: int, x0, trace: BenchmarkTrace) -> BenchmarkTrace:
    """Held-out fitness of the initial point and of the iterate at each checkpoint."""
    p = cfg.problem
    spec = problem_spec(cfg)
    held = RngStream(seed).child("held-out")

    def score(theta):
        return held_out_fitness(spec, theta, held, p["held_out_instances"], p["held_out_trajectories"])

    out = BenchmarkTrace()
    out.append(0, x0, float("nan"), score(x0))
    n = np.asarray(trace.n_s)
    for cp in checkpoint_grid(cfg.budget, p["checkpoints"]):
        i = int(np.searchsorted(n, cp, side="right")) - 1
        if i < 0 or trace.n_s[i] <= out.n_s[-1]:
            continue
        out.append(trace.n_s[i], trace.x[i], trace.window_norm[i], score(trace.x[i]))
    return out


@dataclass
class SeedResult:
    seed: int
    value: float
    rows: list  # (step, n_s, window_norm, fitness)
    extra: dict = field(default_factory=dict)


def _trace_rows(trace: BenchmarkTrace, steps=None) -> list:
    steps = range(1, len(trace) + 1) if steps is None else steps
    return [(s, n, w, f) for s, n, w, f in zip(steps, trace.n_s, trace.window_norm, trace.fitness)]


def run_seed(cfg: ExperimentConfig, seed: int) -> SeedResult:
    try:
        return _run_seed(cfg, seed)
    except Exception as exc:  # attribute failures to the seed
        raise RuntimeError(f"seed {seed}: {type(exc).__name__}: {exc}") from exc


def _run_seed(cfg: ExperimentConfig, seed: int) -> SeedResult:
    if cfg.kind in ("rosenbrock", "artificial", "convergence"):
        _, x, trace = run_optimizer(cfg, seed)
        return SeedResult(seed, trace.fitness[-1], _trace_rows(trace), {"x_final": list(map(float, x))})
    if cfg.kind in ("tune-sat", "tune-ising"):
        x0, x, trace = run_optimizer(cfg, seed)
        cps = tuning_checkpoints(cfg, seed, x0, trace)
        step_of = {n: i + 1 for i, n in enumerate(trace.n_s)}
        steps = [0] + [step_of[n] for n in cps.n_s[1:]]
        extra = {"x0": list(map(float, x0)), "x_final": list(map(float, x)), "initial_fitness": cps.fitness[0]}
        return SeedResult(seed, cps.fitness[-1], _trace_rows(cps, steps), extra)
    if cfg.kind == "eigenratio":
        p = cfg.problem
        algo = dict(cfg.algo)
        algo.pop("x0", None)
        tr = eigenratio_trace(
            p["hessian_ratio"],
            RngStream(seed),
            budget=cfg.budget,
            theta0=math.radians(p["theta0_deg"]),
            curvature=p["curvature"],
            **algo,
        )
        rows = [(i + 1, n, w, r) for i, (n, w, r) in enumerate(zip(tr.n_s, tr.window_norm, tr.ratio))]
        return SeedResult(seed, float(tr.ratio[-1]), rows, {"target": tr.target})
    if cfg.kind == "alignment":
        curve = _alignment(cfg, seed)
        rows = [(math.degrees(t), a, b, c) for t, a, b, c in curve.rows()]
        emp_argmin = float(np.degrees(curve.theta[int(np.argmin(curve.empirical))]))
        extra = {"argmin_exact_deg": float(np.degrees(curve.argmin_exact())), "argmin_empirical_deg": emp_argmin}
        return SeedResult(seed, emp_argmin, rows, extra)
    raise ValueError(f"unknown kind {cfg.kind!r}")


def _alignment(cfg: ExperimentConfig, seed: int) -> AlignmentCurve:
    p = cfg.problem
    thetas = np.radians(np.arange(0.0, 180.0, p["grid_step_deg"]))
    return alignment_scan(
        thetas,
        hessian_eigs=tuple(p["hessian_eigs"]),
        kernel_eigs=tuple(p["kernel_eigs"]),
        theta0=math.radians(p["theta0_deg"]),
        n_s=p["n_s"],
        draws=cfg.budget,
        rng=RngStream(seed),
    )


METRICS = {
    "rosenbrock": "final_fitness",
    "artificial": "final_fitness",
    "convergence": "final_fitness",
    "tune-sat": "held_out_success",
    "tune-ising": "held_out_soft_success",
    "eigenratio": "final_kernel_eigenratio",
    "alignment": "argmin_empirical_deg",
}


def _header(kind: str) -> str:
    if kind == "alignment":
        return "theta_deg,E_exact,E_approx,E_empirical"
    if kind == "eigenratio":
        return "step,n_s,window_norm,ratio"
    return "step,n_s,window_norm,fitness"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.9g" % v


def write_trace_csv(path: Path, cfg: ExperimentConfig, seed: int, rows) -> None:
    meta = json.dumps({"config": cfg.to_dict(), "seed": seed}, sort_keys=True)
    lines = [f"# {meta}", _header(cfg.kind)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace_csv(path) -> tuple[dict, np.ndarray]:
    """``(metadata, rows)`` of a trace file written by :func:`write_trace_csv`."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    meta = json.loads(text[0][2:])
    rows = np.array([[float(v) for v in line.split(",")] for line in text[2:]]).reshape(-1, 4)
    return meta, rows


def version_string() -> str:
    try:
        res = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if res.returncode == 0 and res.stdout.strip():
            return f"{__version__}+{res.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        env = os.environ.get("ANISO_TUNE_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise ConfigError([f"ANISO_TUNE_JOBS: expected an integer, got {env!r}"]) from None
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError(["jobs: must be >= 1"])
    return jobs


def run_experiment(cfg: ExperimentConfig, jobs: int | None = 1) -> dict:
    """Run every seed, write the trace files and ``summary.json``; returns the summary."""
    jobs = resolve_jobs(jobs)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if jobs > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cfg.seeds))) as pool:
            results = list(pool.map(run_seed, [cfg] * len(cfg.seeds), cfg.seeds))
    else:
        results = [run_seed(cfg, s) for s in cfg.seeds]
    for res in results:
        write_trace_csv(out / f"trace_seed{res.seed}.csv", cfg, res.seed, res.rows)
    values = np.array([r.value for r in results], dtype=float)
    summary = {
        "config": cfg.to_dict(),
        "metric": METRICS[cfg.kind],
        "per_seed": {str(r.seed): r.value for r in results},
        "mean": float(np.mean(values)),
        "worst": float(np.min(values)),
        "best": float(np.max(values)),
        "details": {str(r.seed): r.extra for r in results},
        "version": version_string(),
    }
    if cfg.kind == "convergence":
        summary["fit"] = _convergence_fit(cfg, results)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def _convergence_fit(cfg: ExperimentConfig, results) -> dict:
    traces = []
    for r in results:
        t = BenchmarkTrace()
        for _, n, w, f in r.rows:
            t.append(n, np.zeros(1), w, f)
        traces.append(t)
    start = max(t.n_s[0] for t in traces)
    grid = np.unique(np.geomspace(start, cfg.budget, 80).astype(int))
    try:
        c, slope = fit_convergence(average_trace(traces, grid), dim=cfg.dim)
    except ValueError as exc:
        return {"error": str(exc)}
    return {"c": c, "slope": slope}


# -- entry point -------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description="Run seeded smoothing-optimizer experiments.")
    p.add_argument("kind", nargs="?", choices=KINDS, help="experiment kind")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seeds", help="comma-separated seeds, overrides the config")
    p.add_argument("--budget", type=int, help="oracle-call budget, overrides the config")
    p.add_argument("--out", help="output directory, overrides the config")
    p.add_argument("--jobs", type=int, help="parallel seed workers (default: $ANISO_TUNE_JOBS or all cores)")
    p.add_argument("--list", action="store_true", help="list experiment kinds and algorithms")
    return p


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.list:
        print("kinds:      " + " ".join(KINDS))
        print("algorithms: " + " ".join(ALGORITHMS))
        return 0
    if args.kind is None:
        parser.print_usage(sys.stderr)
        print("bench: error: an experiment kind is required", file=sys.stderr)
        return 2
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"bench: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        raw = json.loads(text) if text.strip() else {}
        if isinstance(raw, dict):
            if args.seeds is not None:
                try:
                    raw["seeds"] = [int(s) for s in args.seeds.split(",") if s.strip()]
                except ValueError:
                    raise ConfigError([f"--seeds: expected comma-separated integers, got {args.seeds!r}"]) from None
            if args.budget is not None:
                raw["budget"] = args.budget
            if args.out is not None:
                raw["out"] = args.out
            text = json.dumps(raw)
        cfg = parse_config(text, kind=args.kind)
        jobs = resolve_jobs(args.jobs)
    except json.JSONDecodeError as exc:
        print(f"bench: config: invalid JSON ({exc.msg} at line {exc.lineno})", file=sys.stderr)
        return 2
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        for err in exc.errors:
            print(f"bench: config error: {err}", file=sys.stderr)
        return 2
    try:
        summary = run_experiment(cfg, jobs=jobs)
    except Exception as exc:  # report and exit nonzero
        print(f"bench: run failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"{cfg.kind}/{cfg.algorithm or '-'}: {summary['metric']} mean={summary['mean']:.4g} "
        f"worst={summary['worst']:.4g} best={summary['best']:.4g} -> {Path(cfg.out) / 'summary.json'}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
