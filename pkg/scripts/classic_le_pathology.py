"""Classic sign-of-LE call versus the two-index assessment on damped oscillations.

The raw-voltage LE of e^{-at}(1 + A cos wt) flips sign with every swing, so
the conventional call is unreliable; the decomposed indices stay stable.
When A*w < a the trace is monotone, EMD finds no IMF, and the ripple stays in
the residual, where it can inflate the recovery index (imfs column = 0).
"""
import numpy as np

from stvsi import (
    AssessConfig,
    ScenarioSpec,
    assess,
    classic_le_verdict,
    gen,
    gen_boundary_pair,
    le_series,
    tune_gamma1,
)
from stvsi.trajectory import differentiate, extract_window


def main():
    cal = tune_gamma1(gen_boundary_pair(0.85, 0.3, 0.55, 1.2), 0.02)
    cfg = AssessConfig(t0=0.0).with_calibration(cal)
    print(f"{'alpha':>5} {'A':>4} {'classic':>8} {'flips':>5} {'tail+':>6}"
          f" {'imfs':>4} {'D_imf':>7} {'D_r':>9} verdicts")
    for alpha in (0.2, 0.5, 1.0):
        for amp in (0.1, 0.2, 0.4):
            traj = gen(ScenarioSpec("damped_osc", alpha=alpha, amp=amp, omega=2 * np.pi))
            w = extract_window(traj, 0.0, 3.0)
            classic = classic_le_verdict(le_series(differentiate(w.v, w.dt), w.dt))
            rep = assess(traj, cfg)
            print(f"{alpha:5.1f} {amp:4.1f} {classic.verdict:>8} {classic.sign_changes:5d}"
                  f" {classic.tail_positive_fraction:6.2f} {rep.n_imfs:4d} {rep.d_kl_imf.value:7.3f}"
                  f" {rep.d_kl_r.value:9.2e} {rep.verdict_imf.band}/{rep.verdict_r.band}")


if __name__ == "__main__":
    main()
