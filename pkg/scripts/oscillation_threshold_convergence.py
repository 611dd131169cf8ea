"""How close a fixed-magnitude oscillation lands to the oscillation threshold of 1.

Sweeps sampling interval, tone frequency and derivative method, for both the
envelope (default) and raw derivative-magnitude modes.
"""
import argparse

import numpy as np

from stvsi import AssessConfig, ScenarioSpec, assess, gen


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--amp", type=float, default=0.1)
    p.add_argument("--window", type=float, default=3.0)
    args = p.parse_args()

    print(f"{'dt':>8} {'f_Hz':>5} {'method':>18} {'envelope':>10} {'raw':>10}")
    for dt in (1e-2, 5e-3, 2e-3, 1e-3, 5e-4):
        for freq in (0.8, 1.5, 3.0):
            traj = gen(ScenarioSpec("fixed_osc", amp=args.amp, omega=2 * np.pi * freq, dt=dt,
                                    duration=args.window + 0.1))
            for method in ("local-polynomial", "central-difference"):
                cfg = AssessConfig(t0=0.0, window_duration=args.window, deriv_method=method)
                env = assess(traj, cfg).d_kl_imf.value
                raw = assess(traj, cfg.replace(magnitude="raw")).d_kl_imf.value
                print(f"{dt:8.0e} {freq:5.1f} {method:>18} {env:10.6f} {raw:10.4g}")


if __name__ == "__main__":
    main()
