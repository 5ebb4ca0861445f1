"""Error decay of DAS (batch exponent 1) on the asymmetric quadratic, fitted as c * D * n^slope.

    python scripts/convergence_scaling.py --dims 2 4 8 --budget 100000
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field

import numpy as np

from anisotune.analysis import average_trace, fit_convergence
from anisotune.cli import parse_config, run_optimizer


@dataclass
class ScalingConfig:
    dims: list = field(default_factory=lambda: [2, 4, 8])
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    budget: int = 100_000
    grid_points: int = 80


def main() -> None:
    d = ScalingConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=d.dims)
    p.add_argument("--seeds", type=int, nargs="+", default=d.seeds)
    p.add_argument("--budget", type=int, default=d.budget)
    sc = ScalingConfig(**vars(p.parse_args()))

    grid = np.unique(np.geomspace(100, sc.budget, sc.grid_points).astype(int))
    print("D,slope,c,final_mean_error")
    for dim in sc.dims:
        cfg = parse_config(json.dumps({"kind": "convergence", "problem": {"D": dim}, "budget": sc.budget}))
        traces = [run_optimizer(cfg, s)[2] for s in sc.seeds]
        avg = average_trace(traces, grid)
        c, slope = fit_convergence(avg, dim=dim)
        print(f"{dim},{slope:.4f},{c:.4f},{1.0 - avg.fitness[-1]:.4g}", flush=True)


if __name__ == "__main__":
    main()
