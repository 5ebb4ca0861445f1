"""Tune the chaotic-amplitude co-solver on random 3-SAT with DAS; report held-out success.

    python scripts/sat_tuning.py --N 50 --budget 20000 --seeds 1 2 3 --jobs 3
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field

from anisotune.cli import parse_config, run_experiment


@dataclass
class SatTuningConfig:
    N: int = 50
    alpha: float = 4.0
    T: int = 100
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    budget: int = 20_000
    out: str = "runs/tune-sat"
    jobs: int = 1


def main() -> None:
    d = SatTuningConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name in ("N", "T", "budget", "jobs"):
        p.add_argument(f"--{name}", type=int, default=getattr(d, name))
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--seeds", type=int, nargs="+", default=d.seeds)
    p.add_argument("--out", default=d.out)
    sc = SatTuningConfig(**vars(p.parse_args()))

    body = {
        "kind": "tune-sat",
        "problem": {"N": sc.N, "alpha": sc.alpha, "T": sc.T},
        "seeds": sc.seeds,
        "budget": sc.budget,
        "out": sc.out,
    }
    summary = run_experiment(parse_config(json.dumps(body)), jobs=sc.jobs)
    for seed, detail in summary["details"].items():
        print(f"seed {seed}: {json.dumps(detail)}")
    print(f"held-out success mean {summary['mean']:.3f} worst {summary['worst']:.3f} best {summary['best']:.3f}")


if __name__ == "__main__":
    main()
