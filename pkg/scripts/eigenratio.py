"""Kernel curvature eigenratio under DAS with a growth term, for several Hessian ratios.

    python scripts/eigenratio.py --ratios 1 2 4 8 --seeds 1 2 3
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from anisotune.analysis import eigenratio_trace
from anisotune.core import RngStream


@dataclass
class EigenratioConfig:
    ratios: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    budget: int = 100_000
    growth: float = 0.01
    B0: float = 100.0


def main() -> None:
    d = EigenratioConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ratios", type=float, nargs="+", default=d.ratios)
    p.add_argument("--seeds", type=int, nargs="+", default=d.seeds)
    p.add_argument("--budget", type=int, default=d.budget)
    p.add_argument("--growth", type=float, default=d.growth)
    p.add_argument("--B0", type=float, default=d.B0)
    ec = EigenratioConfig(**vars(p.parse_args()))

    print("target,seed,final_ratio,tail_ratio,final_window_norm")
    for r in ec.ratios:
        for s in ec.seeds:
            t = eigenratio_trace(r, RngStream(s), budget=ec.budget, growth=ec.growth, B0=ec.B0)
            print(f"{r:g},{s},{t.ratio[-1]:.4f},{t.tail_ratio():.4f},{t.window_norm[-1]:.4g}", flush=True)


if __name__ == "__main__":
    main()
