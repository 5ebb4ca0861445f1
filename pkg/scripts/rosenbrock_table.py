"""Final true fitness on the noisy modified Rosenbrock function for every optimizer.

    python scripts/rosenbrock_table.py --dims 2 4 --budget 100000 --jobs 4
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field

from anisotune.cli import ALGORITHMS, parse_config, run_experiment


@dataclass
class TableConfig:
    dims: list = field(default_factory=lambda: [2, 4])
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    budget: int = 100_000
    out: str = "runs/rosenbrock-table"
    jobs: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=TableConfig().dims)
    p.add_argument("--algorithms", nargs="+", default=TableConfig().algorithms, choices=ALGORITHMS)
    p.add_argument("--seeds", type=int, nargs="+", default=TableConfig().seeds)
    p.add_argument("--budget", type=int, default=TableConfig.budget)
    p.add_argument("--out", default=TableConfig.out)
    p.add_argument("--jobs", type=int, default=TableConfig.jobs)
    tc = TableConfig(**vars(p.parse_args()))

    print(f"{'algorithm':<14}" + "".join(f"{'D=' + str(d) + ' mean/worst/best':>26}" for d in tc.dims))
    for algorithm in tc.algorithms:
        cells = []
        for d in tc.dims:
            body = {
                "kind": "rosenbrock",
                "algorithm": algorithm,
                "problem": {"D": d},
                "seeds": tc.seeds,
                "budget": tc.budget,
                "out": f"{tc.out}/{algorithm}-D{d}",
            }
            s = run_experiment(parse_config(json.dumps(body)), jobs=tc.jobs)
            cells.append(f"{s['mean']:.3f} / {s['worst']:.3f} / {s['best']:.3f}")
        print(f"{algorithm:<14}" + "".join(f"{c:>26}" for c in cells), flush=True)


if __name__ == "__main__":
    main()
