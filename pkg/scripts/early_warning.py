"""Verdict from the 3 s post-clearing window versus the long-horizon truth.

Composite recoveries with a damped oscillation ride on top; the ground truth is
the closed-form recovery index of the underlying exponential recovery.
Rates between the two boundary signals (0.3 < alpha < 1.2) are marked "in";
that is where window errors can flip the band.
"""
import math

import numpy as np

from stvsi import AssessConfig, ScenarioSpec, assess, classify, gen, gen_boundary_pair, tune_gamma1


def main():
    cal = tune_gamma1(gen_boundary_pair(0.85, 0.3, 0.55, 1.2), 0.02)
    cfg = AssessConfig(dip_threshold=0.9).with_calibration(cal)
    agree = outside = agree_outside = 0
    cases = [(r0, a) for r0 in (0.6, 0.7, 0.8) for a in (0.2, 0.4, 0.8, 1.5, 2.5)]
    for r0, alpha in cases:
        traj = gen(ScenarioSpec("composite", r0=r0, alpha=alpha, amp=0.05,
                                omega=2 * np.pi * 1.2, alpha_osc=0.6, duration=30.0))
        rep = assess(traj, cfg)
        truth = abs(math.log(r0)) * math.exp(cal.gamma1 * (math.exp(-alpha) - 0.5))
        expected = classify(truth, cal.d_critical_r, cal.epsilon).band
        ok = rep.verdict_r.band == expected
        inside = 0.3 < alpha < 1.2
        agree += ok
        outside += not inside
        agree_outside += ok and not inside
        print(f"R0={r0:.2f} alpha={alpha:4.1f} {'in ' if inside else 'out'} window "
              f"d_r={rep.d_kl_r.value:7.4f} truth={truth:7.4f} {rep.verdict_r.band:>9} vs {expected}")
    print(f"{agree}/{len(cases)} verdicts agree; {agree_outside}/{outside} outside the bracket")


if __name__ == "__main__":
    main()
