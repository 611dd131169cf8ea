"""Voltage trajectories, post-fault windows and derivative estimation."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO, Iterable, Literal, Union

import numpy as np

from .errors import (
    InvalidTrajectory,
    MalformedCsv,
    NoFaultDetected,
    NonUniformSampling,
    TooShort,
    WindowOutOfRange,
)

MIN_SAMPLES = 8
# relative jitter allowed on the sampling interval
SPACING_RTOL = 1e-6

DerivMethod = Literal["central-difference", "local-polynomial"]


def _as_array(x) -> np.ndarray:
    a = np.array(x, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class VoltageTrajectory:
    """Uniformly sampled per-unit voltage magnitude.

    ``dt`` is inferred as the median time step when not given.
    """

    t: np.ndarray
    v: np.ndarray
    dt: float = None  # type: ignore[assignment]
    meta: str = ""

    def __post_init__(self):
        t = _as_array(self.t)
        v = _as_array(self.v)
        if t.ndim != 1 or t.shape != v.shape:
            raise InvalidTrajectory("t and v must be 1-D arrays of equal length")
        if len(t) < MIN_SAMPLES:
            raise TooShort(f"trajectory needs >= {MIN_SAMPLES} samples, got {len(t)}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidTrajectory("non-finite sample")
        if np.any(v < 0):
            raise InvalidTrajectory("negative voltage magnitude")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise NonUniformSampling("timestamps must be strictly increasing")
        # rounded so that different spans of one feed agree on dt bit-for-bit
        dt = float(f"{np.median(steps):.12g}") if self.dt is None else float(self.dt)
        if np.max(np.abs(steps - dt)) > SPACING_RTOL * dt:
            raise NonUniformSampling(
                f"sampling jitter {np.max(np.abs(steps - dt)) / dt:.3g} exceeds {SPACING_RTOL}"
            )
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "dt", dt)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def duration(self) -> float:
        """Time covered by the samples, ``len * dt``."""
        return len(self.t) * self.dt

    def shifted(self, offset: float) -> "VoltageTrajectory":
        return VoltageTrajectory(self.t + offset, self.v, self.dt, self.meta)

    def __eq__(self, other):
        if not isinstance(other, VoltageTrajectory):
            return NotImplemented
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.v, other.v)
            and self.dt == other.dt
        )


@dataclass(frozen=True, eq=False)
class AnalysisWindow:
    t0: float
    duration: float
    t: np.ndarray
    v: np.ndarray
    dt: float
    start_index: int = 0

    def __len__(self) -> int:
        return len(self.v)

    def with_values(self, values) -> "AnalysisWindow":
        """Same time base, different samples (e.g. a residual or IMF sum)."""
        values = _as_array(values)
        if values.shape != self.v.shape:
            raise ValueError("values must match the window length")
        return AnalysisWindow(self.t0, self.duration, self.t, values, self.dt, self.start_index)

    @classmethod
    def from_values(cls, values, dt: float, t0: float = 0.0) -> "AnalysisWindow":
        values = _as_array(values)
        t = _as_array(t0 + dt * np.arange(len(values)))
        return cls(t0, len(values) * dt, t, values, dt)


@dataclass(frozen=True, eq=False)
class DerivativeSeries:
    values: np.ndarray
    method: str = "local-polynomial"

    def __post_init__(self):
        values = _as_array(self.values)
        if not np.all(np.isfinite(values)):
            raise ValueError("derivative contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# CSV

def read_csv(source: Union[IO[str], IO[bytes], str, bytes], meta: str = "") -> VoltageTrajectory:
    """Parse a ``t,v`` CSV into a trajectory."""
    raw = source if isinstance(source, (str, bytes)) else source.read()
    try:
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    except UnicodeDecodeError as exc:
        raise MalformedCsv(f"not UTF-8 text: {exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows or [c.strip().lower() for c in rows[0]] != ["t", "v"]:
        raise MalformedCsv("expected header row 't,v'")
    body = rows[1:]
    t = np.empty(len(body))
    v = np.empty(len(body))
    for i, row in enumerate(body):
        if len(row) != 2:
            raise MalformedCsv(f"row {i + 2}: expected 2 columns, got {len(row)}")
        try:
            t[i] = float(row[0])
            v[i] = float(row[1])
        except ValueError as exc:
            raise MalformedCsv(f"row {i + 2}: {exc}") from None
    if len(body) < MIN_SAMPLES:
        raise TooShort(f"need >= {MIN_SAMPLES} rows, got {len(body)}")
    try:
        return VoltageTrajectory(t, v, meta=meta)
    except (NonUniformSampling, TooShort):
        raise
    except InvalidTrajectory as exc:
        raise MalformedCsv(str(exc)) from None


ingest_csv = read_csv


def load_csv(path) -> VoltageTrajectory:
    with open(path, "rb") as fh:
        return read_csv(fh, meta=str(path))


def write_csv(traj: VoltageTrajectory, sink: IO[str]) -> None:
    sink.write("t,v\n")
    for t, v in zip(traj.t.tolist(), traj.v.tolist()):
        sink.write(f"{t!r},{v!r}\n")


emit_csv = write_csv


def to_csv_text(traj: VoltageTrajectory) -> str:
    buf = io.StringIO()
    write_csv(traj, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# fault window

def detect_fault_clearing(
    traj: VoltageTrajectory,
    dip_threshold: float = 0.7,
    clear_slope: float = 0.01,
    depth_tol: float = 0.1,
) -> float:
    """Time at which the voltage starts recovering after its deepest dip.

    The dip bottom is the first sample within ``depth_tol * (dip_threshold -
    min v)`` of the minimum, so a post-clearing swing that sags marginally
    below the fault plateau does not move the anchor. The recovery onset is
    the first sample from there whose forward difference reaches
    ``clear_slope`` (pu/s).
    """
    if not 0 < dip_threshold < 1:
        raise ValueError("dip_threshold must lie in (0, 1)")
    if clear_slope <= 0:
        raise ValueError("clear_slope must be positive")
    if not 0 <= depth_tol < 1:
        raise ValueError("depth_tol must lie in [0, 1)")
    v = traj.v
    lowest = float(np.min(v))
    if lowest >= dip_threshold:
        raise NoFaultDetected(f"no sample below {dip_threshold} pu")
    bottom = int(np.argmax(v <= lowest + depth_tol * (dip_threshold - lowest)))
    slope = np.diff(v[bottom:]) / traj.dt
    rising = np.flatnonzero(slope >= clear_slope)
    if len(rising) == 0:
        raise NoFaultDetected("voltage never recovers after the dip")
    return float(traj.t[bottom + rising[0]])


def extract_window(traj: VoltageTrajectory, t0: float, duration: float = 3.0) -> AnalysisWindow:
    """Slice ``round(duration / dt)`` samples starting at the first sample with t >= t0."""
    if duration <= 0:
        raise WindowOutOfRange("duration must be positive")
    if t0 < traj.t[0] - 1e-6 * traj.dt:
        raise WindowOutOfRange(f"t0={t0} precedes trajectory start {traj.t[0]}")
    start = int(np.searchsorted(traj.t, t0 - 1e-6 * traj.dt, side="left"))
    n = int(round(duration / traj.dt))
    if start >= len(traj) or start + n > len(traj):
        raise WindowOutOfRange(
            f"window [{t0}, {t0 + duration}) exceeds trajectory end {traj.t[-1]}"
        )
    sl = slice(start, start + n)
    return AnalysisWindow(
        t0=float(traj.t[start]),
        duration=n * traj.dt,
        # fresh buffers: results must not depend on the parent's memory layout
        t=_as_array(traj.t[sl]),
        v=_as_array(traj.v[sl]),
        dt=traj.dt,
        start_index=start,
    )


# ---------------------------------------------------------------------------
# derivatives
#
# Interior samples use a symmetric stencil. Samples too close to an edge use a
# one-sided minimum-norm stencil whose moments match the interior stencil's,
# so the truncation error is the same everywhere and derivative ratios stay
# unbiased. That matters because the LE estimate divides by the first sample.

_INTERIOR = {
    "central-difference": np.array([-0.5, 0.0, 0.5]),
    "local-polynomial": np.arange(-3, 4) / 28.0,
}
_MIN_LENGTH = {"central-difference": 3, "local-polynomial": 5}


@lru_cache(maxsize=None)
def _edge_stencils(method: str, n: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    c = _INTERIOR[method]
    w = len(c)
    m = w // 2
    j = np.arange(-m, m + 1, dtype=float)
    n_pts = min(n, 3 * w)
    n_mom = min(5, n_pts)
    moments = np.array([np.sum(c * j**q) for q in range(n_mom)])
    out = {}
    edge = [i for i in range(n) if i < m or i >= n - m]
    for i in edge:
        first = 0 if i < m else n - n_pts
        pts = np.arange(first, first + n_pts)
        offsets = (pts - i).astype(float)
        A = np.vander(offsets, n_mom, increasing=True).T
        a, *_ = np.linalg.lstsq(A, moments, rcond=None)
        out[i] = (pts, a)
    return out


def differentiate(values, dt: float, method: DerivMethod = "local-polynomial") -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if method not in _INTERIOR:
        raise ValueError(f"unknown derivative method {method!r}")
    n = len(values)
    if n < _MIN_LENGTH[method]:
        raise TooShort(f"{method} needs >= {_MIN_LENGTH[method]} samples, got {n}")
    c = _INTERIOR[method]
    m = len(c) // 2
    out = np.empty(n)
    if n > 2 * m:
        # correlate: out[i] = sum_j c[j] * values[i - m + j]
        out[m : n - m] = np.correlate(values, c, mode="valid")
    for i, (pts, a) in _edge_stencils(method, n).items():
        # relative to the centre sample so constants differentiate to exactly 0
        out[i] = a @ (values[pts] - values[i])
    return out / dt


def estimate_derivative(
    window: AnalysisWindow, method: DerivMethod = "local-polynomial"
) -> DerivativeSeries:
    return DerivativeSeries(differentiate(window.v, window.dt, method), method)


def from_samples(samples: Iterable[tuple[float, float]], meta: str = "") -> VoltageTrajectory:
    pairs = np.asarray(list(samples), dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidTrajectory("expected (t, v) pairs")
    return VoltageTrajectory(pairs[:, 0], pairs[:, 1], meta=meta)
