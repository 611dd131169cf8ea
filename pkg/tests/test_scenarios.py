import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stvsi import AssessConfig, assess
from stvsi.errors import InvalidSpec
from stvsi.scenarios import KINDS, ScenarioSpec, gen, gen_boundary_pair


def test_fixed_osc_zero_amplitude_constant():
    assert np.all(gen(ScenarioSpec("fixed_osc", amp=0.0)).v == 1.0)


def test_exp_recovery_value():
    traj = gen(ScenarioSpec("exp_recovery", r0=0.7, alpha=0.693, t_clear=1.0, dt=1e-3))
    i = int(np.argmin(np.abs(traj.t - 2.0)))
    assert traj.v[i] == pytest.approx(1 - 0.3 * math.exp(-0.693), abs=1e-12)
    assert traj.v[i] == pytest.approx(0.85, abs=1e-4)
    assert traj.v[0] == 1.0
    assert traj.v[int(round(0.75 / 1e-3))] == 0.7


def test_damped_osc_values():
    traj = gen(ScenarioSpec("damped_osc", alpha=0.5, amp=0.2, omega=2 * np.pi))
    assert traj.v[0] == pytest.approx(1.2)
    i = int(round(2.0 / 1e-3))
    assert traj.v[i] == pytest.approx(math.exp(-1) * 1.2, rel=1e-9)
    j = int(round(2.5 / 1e-3))
    assert traj.v[j] == pytest.approx(math.exp(-1.25) * 0.8, rel=1e-9)


def test_composite_continuous_at_clearing():
    traj = gen(ScenarioSpec("composite", r0=0.6, amp=0.1, omega=2 * np.pi, duration=4))
    assert np.max(np.abs(np.diff(traj.v[900:1100]))) < 1e-3


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_valid_and_seeded(kind):
    spec = ScenarioSpec(kind, noise_sigma=1e-3, seed=7, duration=4)
    a, b = gen(spec), gen(spec)
    assert np.array_equal(a.v, b.v)
    assert not np.array_equal(a.v, gen(ScenarioSpec(kind, noise_sigma=1e-3, seed=8, duration=4)).v)
    assert len(a) == 4001 and a.dt == pytest.approx(1e-3)


@pytest.mark.parametrize(
    "spec",
    [
        ScenarioSpec("fixed_osc", dt=0),
        ScenarioSpec("fixed_osc", duration=1e-3),
        ScenarioSpec("fixed_osc", amp=-0.1),
        ScenarioSpec("exp_recovery", r0=1.2),
        ScenarioSpec("exp_recovery", t_fault=2.0, t_clear=1.0),
        ScenarioSpec("fixed_osc", amp=1.5),
        ScenarioSpec("nope"),  # type: ignore[arg-type]
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(InvalidSpec):
        gen(spec)


def test_boundary_pair_construction():
    pair = gen_boundary_pair(0.85, 0.3, 0.55, 1.2)
    i = int(round(1.0 / 1e-3))
    assert pair.s1.v[i] == pytest.approx(0.85) and pair.s2.v[i] == pytest.approx(0.55)
    assert pair.t0_s1 == pair.t0_s2 == 1.0
    with pytest.raises(InvalidSpec):
        gen_boundary_pair(0.6, 0.3, 0.6, 1.2)
    with pytest.raises(InvalidSpec):
        gen_boundary_pair(0.85, 0.5, 0.55, 0.5)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(KINDS),
    st.floats(0.05, 2),
    st.floats(0, 0.3),
    st.floats(0.5, 5),
    st.floats(0.3, 0.95),
)
def test_generated_trajectories_valid(kind, alpha, amp, freq, r0):
    traj = gen(ScenarioSpec(kind, alpha=alpha, amp=amp, omega=2 * np.pi * freq, r0=r0, beta=0.1))
    assert np.all(traj.v >= 0) and np.all(np.isfinite(traj.v))


def test_ground_truth_verdicts():
    cfg = AssessConfig(t0=0.0)
    osc = dict(amp=0.1, omega=2 * np.pi * 1.5)
    damped = assess(gen(ScenarioSpec("damped_osc", alpha=0.5, **osc)), cfg).d_kl_imf.value
    growing = assess(gen(ScenarioSpec("growing_osc", beta=0.3, **osc)), cfg).d_kl_imf.value
    fixed = assess(gen(ScenarioSpec("fixed_osc", **osc)), cfg).d_kl_imf.value
    assert damped < 1 < growing
    assert fixed == pytest.approx(1.0, abs=0.05)
    for r0, alpha in [(0.6, 0.4), (0.8, 1.2)]:
        traj = gen(ScenarioSpec("exp_recovery", r0=r0, alpha=alpha, duration=5))
        got = assess(traj, AssessConfig(t0=1.0)).d_kl_r.value
        oracle = abs(math.log(r0)) * math.exp(math.exp(-alpha) - 0.5)
        assert got == pytest.approx(oracle, rel=0.02)
