"""Empirical mode decomposition by cubic-spline sifting.

A window is split into intrinsic mode functions (highest frequency first)
plus a residual trend. The residual is defined by exact subtraction, so the
reconstruction identity holds to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InsufficientExtrema, TooShort
from .trajectory import AnalysisWindow

MIN_WINDOW = 16


@dataclass(frozen=True)
class EmdConfig:
    sd_tol: float = 0.2
    max_sift_iters: int = 50
    max_imfs: int = 8
    boundary: Literal["endpoint", "mirror", "none"] = "endpoint"
    mean_env_tol: float = 0.05

    def __post_init__(self):
        if self.sd_tol <= 0:
            raise ValueError("sd_tol must be positive")
        if self.max_sift_iters < 1 or self.max_imfs < 1:
            raise ValueError("max_sift_iters and max_imfs must be >= 1")
        if self.boundary not in ("endpoint", "mirror", "none"):
            raise ValueError(f"unknown boundary {self.boundary!r}")


@dataclass(frozen=True, eq=False)
class Imf:
    values: np.ndarray
    index: int
    sift_iters: int = 0


@dataclass(frozen=True, eq=False)
class Decomposition:
    imfs: list[Imf]
    residual: np.ndarray
    config_echo: EmdConfig = field(default_factory=EmdConfig)

    @property
    def n_imfs(self) -> int:
        return len(self.imfs)

    def imf_matrix(self, n: Optional[int] = None) -> np.ndarray:
        n = len(self.residual) if n is None else n
        if not self.imfs:
            return np.zeros((0, n))
        return np.vstack([imf.values for imf in self.imfs])


def find_extrema(values) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior maxima and minima.

    Flat runs count once, at their midpoint; runs touching either end are
    ignored.
    """
    x = np.asarray(values, dtype=float)
    if len(x) < 3:
        raise TooShort("need at least 3 samples")
    # collapse runs of equal values
    change = np.flatnonzero(np.diff(x) != 0) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change - 1, [len(x) - 1]))
    levels = x[starts]
    if len(levels) < 3:
        return np.array([], dtype=int), np.array([], dtype=int)
    left = levels[1:-1] - levels[:-2]
    right = levels[1:-1] - levels[2:]
    mid = (starts[1:-1] + ends[1:-1]) // 2
    maxima = mid[(left > 0) & (right > 0)]
    minima = mid[(left < 0) & (right < 0)]
    return maxima.astype(int), minima.astype(int)


def count_zero_crossings(values) -> int:
    x = np.asarray(values, dtype=float)
    s = np.sign(x[x != 0])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def is_imf(values) -> bool:
    """Extrema count and zero-crossing count differ by at most one."""
    maxima, minima = find_extrema(values)
    return abs(len(maxima) + len(minima) - count_zero_crossings(values)) <= 1


def _mirror_knots(x, maxima, minima, nbsym: int = 2):
    """Reflected extrema beyond both edges (Rilling-style symmetric extension).

    The reflection axis is the edge sample itself when it lies beyond the
    nearest extremum of the opposite kind (the edge then also acts as a knot),
    otherwise the nearest extremum. Returns ``(max_pos, max_val, min_pos,
    min_val)`` including the original extrema.
    """
    n = len(x)
    pos_max = maxima.astype(float)
    pos_min = minima.astype(float)
    val_max = x[maxima]
    val_min = x[minima]

    def side(imax, imin, edge, sign):
        # imax/imin ordered from the edge inwards
        if imax[0] * sign < imin[0] * sign:  # nearest extremum is a max
            if x[edge] > x[imin[0]]:
                lmax, lmin, axis = imax[1 : nbsym + 1], imin[:nbsym], imax[0]
            else:
                lmax, lmin, axis = imax[:nbsym], np.r_[imin[: nbsym - 1], edge], edge
        else:
            if x[edge] < x[imax[0]]:
                lmax, lmin, axis = imax[:nbsym], imin[1 : nbsym + 1], imin[0]
            else:
                lmax, lmin, axis = np.r_[imax[: nbsym - 1], edge], imin[:nbsym], edge
        tmax = 2.0 * axis - lmax
        tmin = 2.0 * axis - lmin
        # reflection must land outside the window, else reflect about the edge
        if (len(tmax) and np.any((tmax - edge) * sign > 0)) or (
            len(tmin) and np.any((tmin - edge) * sign > 0)
        ):
            axis = edge
            lmax, lmin = imax[:nbsym], imin[:nbsym]
            tmax = 2.0 * axis - lmax
            tmin = 2.0 * axis - lmin
        return tmax, x[lmax], tmin, x[lmin]

    l = side(maxima, minima, 0, 1)
    r = side(maxima[::-1], minima[::-1], n - 1, -1)
    mp = np.concatenate((l[0], pos_max, r[0]))
    mv = np.concatenate((l[1], val_max, r[1]))
    np_ = np.concatenate((l[2], pos_min, r[2]))
    nv = np.concatenate((l[3], val_min, r[3]))
    return mp, mv, np_, nv


def _spline(pos, val, n):
    order = np.argsort(pos, kind="stable")
    pos, val = pos[order], val[order]
    keep = np.concatenate(([True], np.diff(pos) > 0))
    pos, val = pos[keep], val[keep]
    if len(pos) < 2:
        raise InsufficientExtrema(f"need >= 2 knots, got {len(pos)}")
    return CubicSpline(pos, val, bc_type="natural")(np.arange(n, dtype=float))


def envelope(values, extrema, boundary: str = "mirror") -> np.ndarray:
    """Natural cubic spline through ``values[extrema]``, evaluated at every sample.

    With ``boundary="mirror"`` the two extrema nearest each edge are reflected
    across that edge before fitting. :func:`envelopes` applies the full
    symmetric extension used by sifting.
    """
    x = np.asarray(values, dtype=float)
    idx = np.asarray(extrema, dtype=int)
    n = len(x)
    pos = idx.astype(float)
    val = x[idx]
    if boundary == "mirror" and len(idx) > 0:
        head = idx[:2]
        tail = idx[-2:]
        pos = np.concatenate((-head.astype(float), pos, 2.0 * (n - 1) - tail))
        val = np.concatenate((x[head], val, x[tail]))
    return _spline(pos, val, n)


def _end_knot(x, idx, edge, upper: bool) -> float:
    """Envelope value at an edge: the endpoint itself or the line through the
    two nearest extrema, whichever lies further out."""
    near = idx[:2] if edge == 0 else idx[-2:]
    if len(near) == 1:
        line = x[near[0]]
    else:
        (i0, i1), (y0, y1) = near, x[near]
        line = y0 + (y1 - y0) * (edge - i0) / (i1 - i0)
    return max(line, x[edge]) if upper else min(line, x[edge])


def envelopes(values, boundary: str = "endpoint") -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower spline envelopes of ``values``."""
    x = np.asarray(values, dtype=float)
    maxima, minima = find_extrema(x)
    n = len(x)
    if boundary == "endpoint":
        out = []
        for idx, upper in ((maxima, True), (minima, False)):
            if len(idx) == 0:
                raise InsufficientExtrema("no extrema for envelope")
            pos = np.concatenate(([0.0], idx.astype(float), [n - 1.0]))
            val = np.concatenate(
                ([_end_knot(x, idx, 0, upper)], x[idx], [_end_knot(x, idx, n - 1, upper)])
            )
            out.append(_spline(pos, val, n))
        return out[0], out[1]
    if len(maxima) < 1 or len(minima) < 1 or boundary == "none":
        return envelope(x, maxima, boundary), envelope(x, minima, boundary)
    mp, mv, np_, nv = _mirror_knots(x, maxima, minima)
    return _spline(mp, mv, len(x)), _spline(np_, nv, len(x))


def mean_envelope(h, boundary: str = "endpoint") -> np.ndarray:
    upper, lower = envelopes(h, boundary)
    return 0.5 * (upper + lower)


def _mean_env_ok(m, h, tol) -> bool:
    return np.sqrt(np.mean(m * m)) <= tol * np.sqrt(np.mean(h * h))


def sift(signal, config: EmdConfig = EmdConfig()) -> Imf:
    """Extract one IMF.

    Sifting stops once the Cauchy SD drops below ``sd_tol``, the removed mean
    envelope is within ``mean_env_tol`` of the candidate's RMS, and the
    candidate satisfies the extrema/zero-crossing property; or after
    ``max_sift_iters`` passes.
    """
    h = np.asarray(signal, dtype=float)
    maxima, minima = find_extrema(h)
    if len(maxima) < 2 or len(minima) < 2:
        raise InsufficientExtrema(
            f"sifting needs >= 2 maxima and minima, got {len(maxima)}/{len(minima)}"
        )
    iters = 0
    for iters in range(1, config.max_sift_iters + 1):
        maxima, minima = find_extrema(h)
        if len(maxima) < 2 or len(minima) < 2:
            iters -= 1
            break
        m = mean_envelope(h, config.boundary)
        h_next = h - m
        denom = np.sum(h * h)
        sd = np.sum(m * m) / denom if denom > 0 else 0.0
        h = h_next
        if sd < config.sd_tol and _mean_env_ok(m, h, config.mean_env_tol) and is_imf(h):
            break
    return Imf(values=h, index=0, sift_iters=iters)


def decompose_values(values, config: EmdConfig = EmdConfig()) -> Decomposition:
    v = np.asarray(values, dtype=float)
    if len(v) < MIN_WINDOW:
        raise TooShort(f"decomposition needs >= {MIN_WINDOW} samples, got {len(v)}")
    imfs: list[Imf] = []
    remainder = v.copy()
    while len(imfs) < config.max_imfs:
        maxima, minima = find_extrema(remainder)
        if len(maxima) < 2 or len(minima) < 2:
            break
        imf = sift(remainder, config)
        imfs.append(Imf(values=imf.values, index=len(imfs) + 1, sift_iters=imf.sift_iters))
        remainder = remainder - imf.values
    if imfs:
        residual = v - np.sum([imf.values for imf in imfs], axis=0)
    else:
        residual = v.copy()
    return Decomposition(imfs=imfs, residual=residual, config_echo=config)


def decompose(window: AnalysisWindow, config: EmdConfig = EmdConfig()) -> Decomposition:
    return decompose_values(window.v, config)


def oscillatory_component(d: Decomposition) -> np.ndarray:
    """Sum of all IMFs; zeros when there are none."""
    if not d.imfs:
        return np.zeros_like(d.residual)
    return np.sum([imf.values for imf in d.imfs], axis=0)
