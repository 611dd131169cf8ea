"""Finite-window Lyapunov exponents from derivative ratios.

lambda(k) = ln(|v'_k| / |v'_0|) / (k dt), k = 1..K-1, and the exponentiated
samples exp(lambda(k)) whose distribution feeds the stability indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import TooShort
from .trajectory import DerivativeSeries

DEFAULT_FLOOR = 1e-9
# keeps exp(lambda) finite when a floored reference derivative blows up lambda
MAX_EXPONENT = 700.0

ComponentTag = Literal["residual", "oscillatory"]


@dataclass(frozen=True, eq=False)
class LESeries:
    lambdas: np.ndarray
    k_grid: np.ndarray
    dt: float
    ref_deriv: float

    def __len__(self) -> int:
        return len(self.lambdas)

    @property
    def times(self) -> np.ndarray:
        return self.k_grid * self.dt


@dataclass(frozen=True, eq=False)
class LESampleSet:
    samples: np.ndarray
    component_tag: ComponentTag = "residual"

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class ClassicVerdict:
    """Conventional sign-of-MLE call, plus how often the sign flips."""

    tail_mean: float
    verdict: Literal["stable", "unstable"]
    sign_changes: int
    tail_positive_fraction: float

    @property
    def ambiguous(self) -> bool:
        return self.sign_changes > 0 or self.verdict == "unstable"


def le_series(deriv, dt: float, floor: float = DEFAULT_FLOOR) -> LESeries:
    values = deriv.values if isinstance(deriv, DerivativeSeries) else np.asarray(deriv, float)
    if len(values) < 2:
        raise TooShort("LE series needs >= 2 derivative samples")
    if floor <= 0:
        raise ValueError("floor must be positive")
    mag = np.maximum(np.abs(values), floor)
    k = np.arange(1, len(values))
    lambdas = np.log(mag[1:] / mag[0]) / (k * dt)
    return LESeries(lambdas=lambdas, k_grid=k, dt=dt, ref_deriv=float(mag[0]))


def le_samples(series: LESeries, tag: ComponentTag = "residual") -> LESampleSet:
    lam = np.clip(series.lambdas, -MAX_EXPONENT, MAX_EXPONENT)
    return LESampleSet(samples=np.exp(lam), component_tag=tag)


def classic_le_verdict(series: LESeries, tail_fraction: float = 0.5) -> ClassicVerdict:
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    lam = series.lambdas
    n_tail = max(1, int(np.ceil(tail_fraction * len(lam))))
    tail = lam[-n_tail:]
    mean = float(np.mean(tail))
    signs = np.sign(lam[lam != 0])
    return ClassicVerdict(
        tail_mean=mean,
        verdict="stable" if mean < 0 else "unstable",
        sign_changes=int(np.count_nonzero(signs[1:] != signs[:-1])),
        tail_positive_fraction=float(np.mean(tail > 0)),
    )


def _half_cycle_peaks(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One refined |x| peak per sign-constant run, edge runs excluded."""
    a = np.abs(x)
    s = np.sign(x)
    nz = np.flatnonzero(s != 0)
    if len(nz) == 0:
        return np.array([]), np.array([])
    # run boundaries on the nonzero samples
    flips = np.flatnonzero(s[nz][1:] != s[nz][:-1])
    bounds = np.concatenate(([nz[0]], nz[flips + 1], [nz[-1] + 1]))
    pos, val = [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        i = lo + int(np.argmax(a[lo:hi]))
        if i == 0 or i == len(x) - 1:
            continue
        y0, y1, y2 = a[i - 1], a[i], a[i + 1]
        if y1 < y0 or y1 < y2:
            continue
        curv = y0 - 2 * y1 + y2
        off = 0.5 * (y0 - y2) / curv if curv < 0 else 0.0
        pos.append(i + off)
        val.append(y1 - 0.25 * (y0 - y2) * off)
    return np.asarray(pos), np.asarray(val)


def derivative_envelope(deriv, rel_floor: float = 1e-3) -> np.ndarray:
    """Amplitude of an oscillating derivative at every sample.

    Half-cycle peaks of |v'| are joined by a natural cubic spline in log
    space and extended linearly past the first and last peak, so exponential
    envelopes (including constant ones) come out exact. Peaks smaller than
    ``rel_floor`` times the largest are dropped. Falls back to |v'| when no
    peak is found.
    """
    values = deriv.values if isinstance(deriv, DerivativeSeries) else np.asarray(deriv, float)
    n = len(values)
    pos, val = _half_cycle_peaks(values)
    if len(val):
        keep = val >= rel_floor * val.max()
        pos, val = pos[keep], val[keep]
    if len(val) == 0:
        return np.abs(values)
    grid = np.arange(n, dtype=float)
    logv = np.log(val)
    if len(val) == 1:
        return np.full(n, val[0])
    spline = CubicSpline(pos, logv, bc_type="natural")
    out = spline(grid)
    for mask, x_end in ((grid < pos[0], pos[0]), (grid > pos[-1], pos[-1])):
        slope = spline(x_end, 1)
        out[mask] = spline(x_end) + slope * (grid[mask] - x_end)
    return np.exp(out)
