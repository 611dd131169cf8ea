"""Degree-of-stability sweep over recovery slowness at a fixed dip depth.

Calibrates on an analytic boundary pair, then scores exponential recoveries
from fast to slow. Writes an optional CSV for plotting.
"""
import argparse
import csv
import math

import numpy as np

from stvsi import AssessConfig, ScenarioSpec, assess, gen, gen_boundary_pair, tune_gamma1


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--r0", type=float, default=0.7)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--epsilon", type=float, default=0.02)
    p.add_argument("--noise", type=float, default=0.0, help="measurement noise sigma (pu)")
    p.add_argument("--out", default=None)
    args = p.parse_args()

    cal = tune_gamma1(gen_boundary_pair(0.85, 0.3, 0.55, 1.2), args.epsilon)
    cfg = AssessConfig(t0=1.0).with_calibration(cal)
    print(f"gamma1={cal.gamma1:.5f} threshold={cal.d_critical_r:.5f} eps={cal.epsilon}")

    rows = []
    for alpha in np.linspace(3.0, 0.2, args.points):
        traj = gen(ScenarioSpec("exp_recovery", r0=args.r0, alpha=alpha, duration=5.0,
                                noise_sigma=args.noise, seed=1))
        rep = assess(traj, cfg)
        closed = abs(math.log(args.r0)) * math.exp(cal.gamma1 * (math.exp(-alpha) - 0.5))
        rows.append((alpha, rep.d_kl_r.value, closed, rep.degree_r, rep.verdict_r.band))
        print(f"alpha={alpha:5.2f} d_r={rep.d_kl_r.value:8.4f} closed={closed:8.4f} "
              f"degree={rep.degree_r:+7.3f} {rep.verdict_r.band}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha", "d_kl_r", "closed_form", "degree_r", "verdict_r"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
