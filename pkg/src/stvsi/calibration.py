"""Sensitivity tuning from critical boundary signals, thresholds and verdicts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .config import AssessConfig
from .divergence import (
    EmpiricalDistribution,
    IndexValue,
    recovery_from_distribution,
    residual_distribution,
)
from .emd import Decomposition, decompose
from .errors import InputError, NoFeasibleGamma
from .scenarios import BoundaryPair
from .trajectory import AnalysisWindow, VoltageTrajectory, detect_fault_clearing, extract_window

SCHEMA_VERSION = "stvsi.calibration/1"

Band = Literal["stable", "critical", "unstable"]


@dataclass(frozen=True)
class CalibrationResult:
    gamma1: float
    d_critical_r: float
    d_s1: float
    d_s2: float
    epsilon: float
    search_trace: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "gamma1": self.gamma1,
            "d_critical_r": self.d_critical_r,
            "d_s1": self.d_s1,
            "d_s2": self.d_s2,
            "epsilon": self.epsilon,
            "search_trace": [[g, d] for g, d in self.search_trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "CalibrationResult":
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InputError(f"unsupported calibration schema {version!r}")
        try:
            return cls(
                gamma1=float(doc["gamma1"]),
                d_critical_r=float(doc["d_critical_r"]),
                d_s1=float(doc["d_s1"]),
                d_s2=float(doc["d_s2"]),
                epsilon=float(doc["epsilon"]),
                search_trace=[(float(g), float(d)) for g, d in doc.get("search_trace", [])],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed calibration document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "CalibrationResult":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"calibration file is not JSON: {exc}") from None
        return cls.from_dict(doc)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "CalibrationResult":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class Verdict:
    band: Band
    margin: float
    component_tag: str

    def to_dict(self) -> dict:
        return {"band": self.band, "margin": self.margin, "component_tag": self.component_tag}


def analysis_window(
    traj: VoltageTrajectory, cfg: AssessConfig, t0: Optional[float] = None
) -> tuple[AnalysisWindow, Decomposition]:
    """Anchor, slice and decompose the post-fault window."""
    if t0 is None:
        t0 = cfg.t0
    if t0 is None:
        t0 = detect_fault_clearing(traj, cfg.dip_threshold, cfg.clear_slope, cfg.depth_tol)
    window = extract_window(traj, t0, cfg.window_duration)
    return window, decompose(window, cfg.emd)


class _RecoveryCurve:
    """Recovery index of one signal as a function of gamma1.

    The LE-sample histogram does not depend on gamma1, so it is built once.
    """

    def __init__(self, traj: VoltageTrajectory, cfg: AssessConfig, t0: Optional[float]):
        window, d = analysis_window(traj, cfg, t0)
        self.r_t0 = float(d.residual[0])
        self.dist: EmpiricalDistribution = residual_distribution(
            d.residual, window.dt, cfg.deriv_method, cfg.bin_count
        )
        self.shift = cfg.residual_shift

    def __call__(self, gamma: float) -> float:
        return recovery_from_distribution(self.dist, self.r_t0, gamma, self.shift).value


def tune_gamma1(
    pair: BoundaryPair,
    epsilon: float = 0.02,
    gamma_range: tuple[float, float] = (0.01, 10.0),
    grid: int = 400,
    cfg: AssessConfig = AssessConfig(),
    rtol: float = 1e-4,
) -> CalibrationResult:
    """Largest gamma1 in ``gamma_range`` with |D_r(s1) - D_r(s2)| < epsilon.

    A log-spaced grid (with local minima of the gap refined) locates the
    last feasible point, then bisection refines the feasibility edge to
    ``rtol`` relative. The threshold is the
    midpoint of the two index values at the returned gamma1.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lo, hi = gamma_range
    if not 0 < lo < hi:
        raise ValueError("gamma_range must satisfy 0 < lo < hi")
    f1 = _RecoveryCurve(pair.s1, cfg, pair.t0_s1)
    f2 = _RecoveryCurve(pair.s2, cfg, pair.t0_s2)
    gap = lambda g: abs(f1(g) - f2(g))

    gammas = np.geomspace(lo, hi, grid)
    gaps = np.array([gap(g) for g in gammas])
    trace = [(float(g), float(d)) for g, d in zip(gammas, gaps)]

    # feasible pockets narrower than the grid spacing hide between grid
    # points; refine every local minimum of the gap
    candidates = [float(g) for g in gammas[gaps < epsilon]]
    for i in range(grid):
        left = gaps[i - 1] if i > 0 else np.inf
        right = gaps[i + 1] if i < grid - 1 else np.inf
        if gaps[i] < epsilon or gaps[i] > left or gaps[i] > right:
            continue
        res = minimize_scalar(
            gap,
            bounds=(gammas[max(i - 1, 0)], gammas[min(i + 1, grid - 1)]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        trace.append((float(res.x), float(res.fun)))
        if res.fun < epsilon:
            candidates.append(float(res.x))
    if not candidates:
        raise NoFeasibleGamma(
            f"min |d_s1 - d_s2| = {gaps.min():.4g} over gamma in [{lo}, {hi}] is not < {epsilon}"
        )
    g_ok = max(candidates)
    above = gammas[gammas > g_ok]
    if len(above):
        g_bad = float(above[0])
        while g_bad - g_ok > rtol * g_ok:
            mid = 0.5 * (g_ok + g_bad)
            d = gap(mid)
            trace.append((mid, float(d)))
            if d < epsilon:
                g_ok = mid
            else:
                g_bad = mid
        trace.append((g_bad, float(gap(g_bad))))
    d1, d2 = f1(g_ok), f2(g_ok)
    return CalibrationResult(
        gamma1=g_ok,
        d_critical_r=0.5 * (d1 + d2),
        d_s1=d1,
        d_s2=d2,
        epsilon=float(epsilon),
        search_trace=trace,
    )


def classify(
    value: Union[IndexValue, float],
    threshold: float,
    epsilon: float = 0.0,
    component_tag: Optional[str] = None,
) -> Verdict:
    """Band an index against its threshold with a +-epsilon/2 critical zone."""
    if isinstance(value, IndexValue):
        component_tag = component_tag or value.component_tag
        value = value.value
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if value > threshold + 0.5 * epsilon:
        band: Band = "unstable"
    elif value < threshold - 0.5 * epsilon:
        band = "stable"
    else:
        band = "critical"
    return Verdict(band, float(threshold - value), component_tag or "")


def degree_of_stability(value: Union[IndexValue, float], threshold: float) -> float:
    """1 - value/threshold: headroom fraction when positive, overshoot when negative."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if isinstance(value, IndexValue):
        value = value.value
    return 1.0 - value / threshold
