"""Analytic voltage trajectories with known ground truth."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import InvalidSpec
from .trajectory import VoltageTrajectory

Kind = Literal["damped_osc", "fixed_osc", "growing_osc", "exp_recovery", "composite"]
KINDS = ("damped_osc", "fixed_osc", "growing_osc", "exp_recovery", "composite")


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters for :func:`gen`.

    ``alpha`` is the damping rate for ``damped_osc`` and the recovery rate
    for ``exp_recovery``/``composite``; ``beta`` is the growth rate of
    ``growing_osc``; ``alpha_osc`` damps the oscillation of ``composite``.
    """

    kind: Kind
    alpha: float = 0.5
    amp: float = 0.1
    omega: float = 2 * np.pi
    beta: float = 0.2
    alpha_osc: float = 1.0
    r0: float = 0.7
    t_fault: float = 0.5
    t_clear: float = 1.0
    noise_sigma: float = 0.0
    dt: float = 1e-3
    duration: float = 3.0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        if self.dt <= 0:
            raise InvalidSpec("dt must be positive")
        if self.duration < 16 * self.dt:
            raise InvalidSpec("duration must cover at least 16 samples")
        if self.amp < 0 or self.noise_sigma < 0:
            raise InvalidSpec("amp and noise_sigma must be non-negative")
        if self.kind in ("exp_recovery", "composite"):
            if not 0 < self.r0 < 1:
                raise InvalidSpec("r0 must lie in (0, 1)")
            if not 0 <= self.t_fault <= self.t_clear < self.duration:
                raise InvalidSpec("need 0 <= t_fault <= t_clear < duration")
            if self.alpha <= 0:
                raise InvalidSpec("recovery rate alpha must be positive")


def _samples(spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray]:
    n = int(round(spec.duration / spec.dt)) + 1
    t = spec.dt * np.arange(n)
    k = spec.kind
    if k == "damped_osc":
        v = np.exp(-spec.alpha * t) * (1 + spec.amp * np.cos(spec.omega * t))
    elif k == "fixed_osc":
        v = 1 + spec.amp * np.cos(spec.omega * t)
    elif k == "growing_osc":
        v = 1 + spec.amp * np.exp(spec.beta * t) * np.cos(spec.omega * t)
    else:
        tau = t - spec.t_clear
        after = tau >= -0.5 * spec.dt
        rec = 1 - (1 - spec.r0) * np.exp(-spec.alpha * np.where(after, tau, 0.0))
        v = np.where(t < spec.t_fault - 0.5 * spec.dt, 1.0, np.where(after, rec, spec.r0))
        if k == "composite":
            # sine keeps the trace continuous at clearing
            osc = spec.amp * np.exp(-spec.alpha_osc * tau) * np.sin(spec.omega * tau)
            v = v * (1 + np.where(after, osc, 0.0))
    if spec.noise_sigma > 0:
        v = v + np.random.default_rng(spec.seed).normal(0.0, spec.noise_sigma, n)
    return t, v


def gen(spec: ScenarioSpec) -> VoltageTrajectory:
    spec.validate()
    t, v = _samples(spec)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise InvalidSpec("parameters produce a negative or non-finite voltage")
    return VoltageTrajectory(t, v, meta=f"scenario:{spec.kind}")


def closed_form_recovery_index(r0: float, alpha: float, gamma1: float, shift: float = 0.5) -> float:
    """Recovery index of a pure exponential recovery: |ln r0| exp(gamma1 (e^-alpha - shift))."""
    return abs(np.log(r0)) * np.exp(gamma1 * (np.exp(-alpha) - shift))


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """Critical recoveries bracketing the tripping characteristic.

    ``s1`` is the slowest critical recovery (shallow dip), ``s2`` the fastest
    (deep dip). ``t0_s1``/``t0_s2`` are known clearing times when available.
    """

    s1: VoltageTrajectory
    s2: VoltageTrajectory
    t0_s1: Optional[float] = None
    t0_s2: Optional[float] = None

    def shifted(self, offset: float) -> "BoundaryPair":
        shift = lambda t0: None if t0 is None else t0 + offset
        return BoundaryPair(
            self.s1.shifted(offset), self.s2.shifted(offset), shift(self.t0_s1), shift(self.t0_s2)
        )


def gen_boundary_pair(
    y1: float,
    alpha1: float,
    y2: float,
    alpha2: float,
    dt: float = 1e-3,
    duration: float = 5.0,
    t_fault: float = 0.5,
    t_clear: float = 1.0,
) -> BoundaryPair:
    if not 0 < y2 < y1 < 1:
        raise InvalidSpec("need 0 < y2 < y1 < 1")
    if not alpha1 < alpha2:
        raise InvalidSpec("need alpha1 < alpha2")
    common = dict(dt=dt, duration=duration, t_fault=t_fault, t_clear=t_clear)
    s1 = gen(ScenarioSpec("exp_recovery", alpha=alpha1, r0=y1, **common))
    s2 = gen(ScenarioSpec("exp_recovery", alpha=alpha2, r0=y2, **common))
    return BoundaryPair(s1, s2, t_clear, t_clear)
