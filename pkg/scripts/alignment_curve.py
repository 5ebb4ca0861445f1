"""Gradient-error total against kernel orientation, exact / approximate / sampled.

    python scripts/alignment_curve.py --theta0 30 --draws 1000000 > alignment.csv
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from anisotune.analysis import alignment_scan
from anisotune.core import RngStream


@dataclass
class AlignmentConfig:
    theta0_deg: float = 0.0
    step_deg: float = 5.0
    n_s: int = 100
    draws: int = 1_000_000
    seed: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--theta0", type=float, default=AlignmentConfig.theta0_deg)
    p.add_argument("--step", type=float, default=AlignmentConfig.step_deg)
    p.add_argument("--draws", type=int, default=AlignmentConfig.draws, help="0 skips the sampled curve")
    p.add_argument("--seed", type=int, default=AlignmentConfig.seed)
    a = p.parse_args()
    ac = AlignmentConfig(a.theta0, a.step, draws=a.draws, seed=a.seed)

    thetas = np.radians(np.arange(0.0, 180.0, ac.step_deg))
    rng = RngStream(ac.seed) if ac.draws > 0 else None
    curve = alignment_scan(thetas, theta0=math.radians(ac.theta0_deg), n_s=ac.n_s, draws=ac.draws, rng=rng)
    print("theta_deg,E_exact,E_approx,E_empirical")
    for i, th in enumerate(thetas):
        emp = f"{curve.empirical[i]:.6g}" if curve.empirical is not None else ""
        print(f"{math.degrees(th):g},{curve.exact[i]:.6g},{curve.approx[i]:.6g},{emp}")
    print(f"# exact argmin {math.degrees(curve.argmin_exact()):g} deg", flush=True)


if __name__ == "__main__":
    main()
