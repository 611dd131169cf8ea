"""LE-sample histograms, the Gompertz reference and the two stability indices."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from .errors import GridMismatch
from .lyapunov import (
    DEFAULT_FLOOR,
    MAX_EXPONENT,
    LESampleSet,
    derivative_envelope,
    le_samples,
    le_series,
)
from .trajectory import differentiate

# odd so that x = 1.0 sits at a bin centre on the default [0, 2] support
DEFAULT_BINS = 33
RESIDUAL_SHIFT = 0.5
OSCILLATION_SHIFT = 1.0
Q_FLOOR = 1e-12

RangePolicy = Union[Literal["auto"], tuple[float, float]]


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Probability mass on uniform bins.

    ``support`` holds the point at which each bin is evaluated: the mean of
    the samples that fell in it, or the bin centre for empty bins and for
    distributions built directly from masses.
    """

    bin_edges: np.ndarray
    mass: np.ndarray
    support: Optional[np.ndarray] = None

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        mass = np.asarray(self.mass, dtype=float)
        if len(edges) != len(mass) + 1:
            raise ValueError("need len(bin_edges) == len(mass) + 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(mass < 0) or abs(mass.sum() - 1.0) > 1e-12:
            raise ValueError("mass must be non-negative and sum to 1")
        support = self.centers_of(edges) if self.support is None else np.asarray(self.support, float)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "support", support)

    @staticmethod
    def centers_of(edges) -> np.ndarray:
        return 0.5 * (edges[1:] + edges[:-1])

    @property
    def centers(self) -> np.ndarray:
        return self.centers_of(self.bin_edges)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


@dataclass(frozen=True)
class GompertzReference:
    gamma: float = 1.0
    shift: float = RESIDUAL_SHIFT

    def __post_init__(self):
        if self.gamma <= 0 or self.shift <= 0:
            raise ValueError("gamma and shift must be positive")


@dataclass(frozen=True)
class IndexValue:
    value: float
    component_tag: Literal["recovery", "oscillation"]
    depth_weight: Optional[float] = None
    entropy_term: float = 0.0
    cross_term: float = 0.0
    raw: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "component_tag": self.component_tag,
            "depth_weight": self.depth_weight,
            "entropy_term": self.entropy_term,
            "cross_term": self.cross_term,
            "raw": self.raw,
            "degenerate": self.degenerate,
        }


def empirical_distribution(
    samples, bin_count: int = DEFAULT_BINS, range_policy: RangePolicy = "auto"
) -> EmpiricalDistribution:
    """Histogram LE samples on uniform bins over ``[0, max(2, max sample)]``.

    A fixed ``(lo, hi)`` range clips out-of-range samples into the end bins.
    """
    x = np.asarray(samples.samples if isinstance(samples, LESampleSet) else samples, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one sample")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if range_policy == "auto":
        lo, hi = 0.0, max(2.0, float(x.max()))
    else:
        lo, hi = map(float, range_policy)
        x = np.clip(x, lo, hi)
    edges = np.linspace(lo, hi, bin_count + 1)
    which = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, bin_count - 1)
    counts = np.bincount(which, minlength=bin_count).astype(float)
    sums = np.bincount(which, weights=x, minlength=bin_count)
    support = EmpiricalDistribution.centers_of(edges)
    occupied = counts > 0
    support[occupied] = sums[occupied] / counts[occupied]
    return EmpiricalDistribution(edges, counts / counts.sum(), support)


def gompertz_pdf(ref: GompertzReference, x):
    """Unnormalised shifted-reversed Gompertz density exp(-exp(gamma (x - shift)))."""
    return np.exp(-np.exp(ref.gamma * (np.asarray(x, dtype=float) - ref.shift)))


def reference_distribution(ref: GompertzReference, like: EmpiricalDistribution) -> EmpiricalDistribution:
    """Gompertz mass on the grid of ``like`` (density at bin centres times width)."""
    w = gompertz_pdf(ref, like.centers) * like.widths
    return EmpiricalDistribution(like.bin_edges, w / w.sum())


def kl_divergence(p: EmpiricalDistribution, q: EmpiricalDistribution) -> float:
    """sum_i P(i) ln(P(i)/Q(i)) in nats."""
    if p.bin_edges.shape != q.bin_edges.shape or not np.allclose(
        p.bin_edges, q.bin_edges, rtol=1e-12, atol=0
    ):
        raise GridMismatch("distributions are on different bin grids")
    qm = np.maximum(q.mass, Q_FLOOR)
    qm = qm / qm.sum()
    occ = p.mass > 0
    return float(np.sum(p.mass[occ] * np.log(p.mass[occ] / qm[occ])))


def _entropy(mass) -> float:
    m = mass[mass > 0]
    return float(-np.sum(m * np.log(m))) + 0.0


def step1_terms(dist: EmpiricalDistribution, ref: GompertzReference) -> tuple[float, float]:
    """(entropy, cross) with index = cross - entropy."""
    expo = np.minimum(ref.gamma * (dist.support - ref.shift), MAX_EXPONENT)
    cross = float(np.sum(dist.mass * np.exp(expo)))
    return _entropy(dist.mass), cross


def step1_index(dist: EmpiricalDistribution, ref: GompertzReference) -> float:
    """sum P ln P + sum P exp(gamma (x - shift)).

    This is the divergence from the Gompertz reference with its normalising
    constant dropped; a point mass at ``shift`` scores exactly 1.
    """
    entropy, cross = step1_terms(dist, ref)
    return cross - entropy


def _is_degenerate(values) -> bool:
    values = np.asarray(values, dtype=float)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    return float(np.ptp(values)) <= 1e-12 * scale


def residual_distribution(
    residual,
    dt: float,
    deriv_method: str = "local-polynomial",
    bin_count: int = DEFAULT_BINS,
    floor: float = DEFAULT_FLOOR,
) -> EmpiricalDistribution:
    series = le_series(differentiate(residual, dt, deriv_method), dt, floor)
    return empirical_distribution(le_samples(series, "residual"), bin_count)


def recovery_from_distribution(
    dist: EmpiricalDistribution, r_t0: float, gamma1: float, shift: float = RESIDUAL_SHIFT
) -> IndexValue:
    entropy, cross = step1_terms(dist, GompertzReference(gamma1, shift))
    weight = abs(float(np.log(r_t0)))
    raw = weight * (cross - entropy)
    return IndexValue(
        value=max(raw, 0.0),
        component_tag="recovery",
        depth_weight=weight,
        entropy_term=entropy,
        cross_term=cross,
        raw=raw,
    )


def recovery_index(
    residual,
    dt: float,
    gamma1: float = 1.0,
    deriv_method: str = "local-polynomial",
    *,
    shift: float = RESIDUAL_SHIFT,
    bin_count: int = DEFAULT_BINS,
    floor: float = DEFAULT_FLOOR,
) -> IndexValue:
    """Recovery index |ln R(t0)| * step1_index(P1, Gompertz(gamma1, 0.5)).

    A constant residual carries no recovery dynamics and scores 0 with
    ``degenerate=True``.
    """
    r = np.asarray(residual, dtype=float)
    r_t0 = float(r[0])
    if not 0 < r_t0 <= 1.5:
        raise ValueError(f"R(t0)={r_t0} outside (0, 1.5]")
    if _is_degenerate(r):
        return IndexValue(0.0, "recovery", depth_weight=abs(float(np.log(r_t0))), degenerate=True)
    dist = residual_distribution(r, dt, deriv_method, bin_count, floor)
    return recovery_from_distribution(dist, r_t0, gamma1, shift)


def oscillation_samples(
    oscillatory,
    dt: float,
    deriv_method: str = "local-polynomial",
    magnitude: Literal["envelope", "raw"] = "envelope",
    floor: float = DEFAULT_FLOOR,
) -> LESampleSet:
    d = differentiate(oscillatory, dt, deriv_method)
    if magnitude == "envelope":
        d = derivative_envelope(d)
    elif magnitude != "raw":
        raise ValueError(f"unknown magnitude mode {magnitude!r}")
    return le_samples(le_series(d, dt, floor), "oscillatory")


def oscillation_index(
    oscillatory,
    dt: float,
    gamma2: float = 1.0,
    deriv_method: str = "local-polynomial",
    *,
    shift: float = OSCILLATION_SHIFT,
    magnitude: Literal["envelope", "raw"] = "envelope",
    bin_count: int = DEFAULT_BINS,
    floor: float = DEFAULT_FLOOR,
) -> IndexValue:
    """Oscillation index step1_index(P2, Gompertz(gamma2, 1.0)).

    By default the derivative magnitude is its half-cycle amplitude envelope,
    so a constant-amplitude oscillation gives LE samples of exactly 1 and an
    index of 1. ``magnitude="raw"`` uses |v'| sample by sample.
    """
    x = np.asarray(oscillatory, dtype=float)
    if not np.any(x):
        return IndexValue(0.0, "oscillation", degenerate=True)
    samples = oscillation_samples(x, dt, deriv_method, magnitude, floor)
    dist = empirical_distribution(samples, bin_count)
    entropy, cross = step1_terms(dist, GompertzReference(gamma2, shift))
    raw = cross - entropy
    return IndexValue(
        value=max(raw, 0.0),
        component_tag="oscillation",
        entropy_term=entropy,
        cross_term=cross,
        raw=raw,
    )
