"""Fixed window sizes against the adaptive isotropic window on the asymmetric quadratic.

Prints the mean error 1 - f(x) over seeds at a few sample counts.

    python scripts/window_tradeoff.py --dim 5 --budget 100000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from anisotune.core import RngStream
from anisotune.objectives import NoiseModel, make_objective
from anisotune.optimizers import DisConfig, FixedWindowConfig, dis_run, fixed_window_run, random_start


@dataclass
class TradeoffConfig:
    dim: int = 5
    sigma: float = 0.1
    widths: list = field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    budget: int = 100_000
    report_at: list = field(default_factory=lambda: [1_000, 10_000, 100_000])


def mean_error(tc: TradeoffConfig, make_run) -> np.ndarray:
    errs = []
    for seed in tc.seeds:
        rng = RngStream(seed)
        obj = make_objective("asym-quad", tc.dim, NoiseModel.gaussian(tc.sigma))
        _, trace = make_run(random_start(tc.dim, rng.child("x0")), obj, rng.child("run"))
        errs.append([1.0 - trace.fitness_at(n) for n in tc.report_at])
    return np.mean(errs, axis=0)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=TradeoffConfig.dim)
    p.add_argument("--sigma", type=float, default=TradeoffConfig.sigma)
    p.add_argument("--budget", type=int, default=TradeoffConfig.budget)
    args = p.parse_args()
    tc = TradeoffConfig(dim=args.dim, sigma=args.sigma, budget=args.budget)
    tc.report_at = [n for n in tc.report_at if n <= tc.budget]

    print(f"{'method':<10}" + "".join(f"{'n=' + str(n):>14}" for n in tc.report_at))
    for w in tc.widths:
        row = mean_error(tc, lambda x0, o, r, w=w: fixed_window_run(FixedWindowConfig(tc.budget, x0, w=w), o, r))
        print(f"{'w=' + str(w):<10}" + "".join(f"{e:>14.4f}" for e in row), flush=True)
    row = mean_error(tc, lambda x0, o, r: dis_run(DisConfig(tc.budget, x0), o, r))
    print(f"{'DIS':<10}" + "".join(f"{e:>14.4f}" for e in row))


if __name__ == "__main__":
    main()
