"""End-to-end assessment: window, EMD, LE samples, indices, verdicts."""
from __future__ import annotations

import json
import queue
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .calibration import Verdict, analysis_window, classify, degree_of_stability
from .config import AssessConfig
from .divergence import IndexValue, oscillation_index, recovery_index
from .emd import Decomposition, oscillatory_component
from .errors import EmptyBatch, NoFaultDetected, StvsiError
from .trajectory import AnalysisWindow, VoltageTrajectory, detect_fault_clearing, load_csv

REPORT_SCHEMA = "stvsi.report/1"


@dataclass(frozen=True)
class StabilityReport:
    d_kl_r: IndexValue
    d_kl_imf: IndexValue
    verdict_r: Optional[Verdict]
    verdict_imf: Verdict
    degree_r: Optional[float]
    degree_imf: float
    t0: float
    n_imfs: int
    r_t0: float
    config: dict
    timings: dict = field(default_factory=dict, compare=False)
    source: str = ""
    d_kl_imf_modes: tuple = ()

    def to_dict(self, timings: bool = True) -> dict:
        doc = {
            "schema_version": REPORT_SCHEMA,
            "source": self.source,
            "d_kl_r": self.d_kl_r.to_dict(),
            "d_kl_imf": self.d_kl_imf.to_dict(),
            "verdict_r": None if self.verdict_r is None else self.verdict_r.to_dict(),
            "verdict_imf": self.verdict_imf.to_dict(),
            "degree_r": self.degree_r,
            "degree_imf": self.degree_imf,
            "t0": self.t0,
            "decomposition": {"n_imfs": self.n_imfs, "r_t0": self.r_t0},
            "config": self.config,
        }
        if self.d_kl_imf_modes:
            doc["d_kl_imf_modes"] = [x.to_dict() for x in self.d_kl_imf_modes]
        if timings:
            doc["timings"] = self.timings
        return doc

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def flat(self) -> dict:
        """Single-row view used for CSV output."""
        return {
            "source": self.source,
            "t0": self.t0,
            "n_imfs": self.n_imfs,
            "r_t0": self.r_t0,
            "d_kl_r": self.d_kl_r.value,
            "d_kl_imf": self.d_kl_imf.value,
            "verdict_r": None if self.verdict_r is None else self.verdict_r.band,
            "verdict_imf": self.verdict_imf.band,
            "degree_r": self.degree_r,
            "degree_imf": self.degree_imf,
            "gamma1": self.config["gamma1"],
            "gamma2": self.config["gamma2"],
            "recovery_threshold": self.config["recovery_threshold"],
        }

    def same_result(self, other: "StabilityReport") -> bool:
        """Equality ignoring timings and the source label."""
        a, b = self.to_dict(timings=False), other.to_dict(timings=False)
        a.pop("source"), b.pop("source")
        return a == b


def assess_decomposition(
    window: AnalysisWindow, d: Decomposition, cfg: AssessConfig, source: str = ""
) -> StabilityReport:
    t_start = time.perf_counter()
    d_r = recovery_index(
        d.residual,
        window.dt,
        cfg.gamma1,
        cfg.deriv_method,
        shift=cfg.residual_shift,
        bin_count=cfg.bin_count,
    )
    # no IMFs means a perfectly damped (absent) oscillation
    d_imf = oscillation_index(
        oscillatory_component(d),
        window.dt,
        cfg.gamma2,
        cfg.deriv_method,
        shift=cfg.oscillation_shift,
        magnitude=cfg.magnitude,
        bin_count=cfg.bin_count,
    )
    if cfg.recovery_threshold is not None:
        verdict_r = classify(d_r, cfg.recovery_threshold, cfg.epsilon)
        degree_r = degree_of_stability(d_r, cfg.recovery_threshold)
    else:
        verdict_r = degree_r = None
    verdict_imf = classify(d_imf, cfg.oscillation_threshold, cfg.oscillation_epsilon)
    modes = per_imf_indices(window, d, cfg) if cfg.per_imf else ()
    return StabilityReport(
        d_kl_r=d_r,
        d_kl_imf=d_imf,
        verdict_r=verdict_r,
        verdict_imf=verdict_imf,
        degree_r=degree_r,
        degree_imf=degree_of_stability(d_imf, cfg.oscillation_threshold),
        t0=window.t0,
        n_imfs=d.n_imfs,
        r_t0=float(d.residual[0]),
        config=cfg.to_dict(),
        timings={"indices_s": time.perf_counter() - t_start},
        source=source,
        d_kl_imf_modes=modes,
    )


def per_imf_indices(window: AnalysisWindow, d: Decomposition, cfg: AssessConfig) -> tuple:
    """Oscillation index of each IMF on its own; the verdict uses the summed IMFs."""
    return tuple(
        oscillation_index(
            imf.values,
            window.dt,
            cfg.gamma2,
            cfg.deriv_method,
            shift=cfg.oscillation_shift,
            magnitude=cfg.magnitude,
            bin_count=cfg.bin_count,
        )
        for imf in d.imfs
    )


def assess(
    traj: VoltageTrajectory, cfg: AssessConfig = AssessConfig(), t0: Optional[float] = None
) -> StabilityReport:
    """Score one trajectory.

    The window starts at ``t0`` if given, else ``cfg.t0``, else the detected
    fault-clearing time.
    """
    t_start = time.perf_counter()
    window, d = analysis_window(traj, cfg, t0)
    t_emd = time.perf_counter()
    report = assess_decomposition(window, d, cfg, source=traj.meta)
    report.timings.update({"window_emd_s": t_emd - t_start, "total_s": time.perf_counter() - t_start})
    return report


# ---------------------------------------------------------------------------
# batch


@dataclass(frozen=True)
class BatchItem:
    source: str
    report: Optional[StabilityReport] = None
    error: Optional[str] = None
    error_type: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.report is not None

    def to_dict(self) -> dict:
        if self.report is not None:
            return {"source": self.source, "ok": True, "report": self.report.to_dict()}
        return {"source": self.source, "ok": False, "error": self.error, "error_type": self.error_type}


def _batch_one(item: Union[VoltageTrajectory, str, Path], cfg: AssessConfig) -> BatchItem:
    source = item.meta if isinstance(item, VoltageTrajectory) else str(item)
    try:
        traj = item if isinstance(item, VoltageTrajectory) else load_csv(item)
        return BatchItem(source, report=assess(traj, cfg))
    except (StvsiError, OSError) as exc:
        return BatchItem(source, error=str(exc), error_type=type(exc).__name__)


def assess_batch(
    inputs: Sequence[Union[VoltageTrajectory, str, Path]],
    cfg: AssessConfig = AssessConfig(),
    workers: Optional[int] = None,
) -> list[BatchItem]:
    """Assess every input independently; failures are recorded per item."""
    inputs = list(inputs)
    if not inputs:
        raise EmptyBatch("batch is empty")
    if workers is None or workers <= 1:
        return [_batch_one(x, cfg) for x in inputs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda x: _batch_one(x, cfg), inputs))


# ---------------------------------------------------------------------------
# streaming


@dataclass(frozen=True)
class StreamEvent:
    kind: str  # "heartbeat" | "fault" | "report" | "feed_gap" | "error"
    t: float
    state: str = ""
    t0: Optional[float] = None
    report: Optional[StabilityReport] = None
    detail: str = ""

    def to_dict(self) -> dict:
        doc = {"event": self.kind, "t": self.t, "state": self.state}
        if self.t0 is not None:
            doc["t0"] = self.t0
        if self.report is not None:
            doc["report"] = self.report.to_dict()
        if self.detail:
            doc["detail"] = self.detail
        return doc


class StreamAssessor:
    """Incremental assessor fed one ``(t, v)`` sample at a time.

    Keeps ``2 * window_duration`` of history. Once a clearing time t0 is found
    it waits for the first sample with t >= t0 + window_duration, emits one
    report and re-arms with an empty buffer.
    """

    def __init__(
        self,
        cfg: AssessConfig = AssessConfig(),
        heartbeat_every: int = 1000,
        gap_factor: float = 3.0,
        source: str = "stream",
    ):
        self.cfg = cfg
        self.heartbeat_every = heartbeat_every
        self.gap_factor = gap_factor
        self.source = source
        self._reset()

    def _reset(self):
        self.t_buf: deque[float] = deque()
        self.v_buf: deque[float] = deque()
        self.dt: Optional[float] = None
        self.t0: Optional[float] = None
        self.in_fault = False
        self._since_beat = 0

    @property
    def state(self) -> str:
        if self.t0 is not None:
            return "collecting"
        return "fault" if self.in_fault else "armed"

    def _trim(self):
        keep = 2.0 * self.cfg.window_duration
        if self.t0 is not None:
            keep = max(keep, self.t_buf[-1] - self.t0 + self.dt)
        while self.t_buf and self.t_buf[-1] - self.t_buf[0] > keep + 0.5 * self.dt:
            self.t_buf.popleft()
            self.v_buf.popleft()

    def _trajectory(self) -> VoltageTrajectory:
        return VoltageTrajectory(np.fromiter(self.t_buf, float), np.fromiter(self.v_buf, float),
                                 meta=self.source)

    def push(self, t: float, v: float) -> list[StreamEvent]:
        events: list[StreamEvent] = []
        if self.t_buf:
            step = t - self.t_buf[-1]
            if self.dt is None:
                self.dt = step
            if step <= 0 or step > self.gap_factor * self.dt:
                events.append(StreamEvent("feed_gap", t, self.state, detail=f"step {step:.6g} s"))
                self._reset()
        self.t_buf.append(float(t))
        self.v_buf.append(float(v))
        if self.dt is not None:
            self._trim()

        if v < self.cfg.dip_threshold and not self.in_fault:
            self.in_fault = True
            events.append(StreamEvent("fault", t, self.state))

        if self.in_fault and self.t0 is None and len(self.t_buf) >= 8:
            try:
                self.t0 = detect_fault_clearing(
                    self._trajectory(), self.cfg.dip_threshold, self.cfg.clear_slope,
                    self.cfg.depth_tol,
                )
            except NoFaultDetected:
                pass

        if self.t0 is not None and t >= self.t0 + self.cfg.window_duration - 1e-6 * self.dt:
            try:
                report = assess(self._trajectory(), self.cfg, t0=self.t0)
                events.append(StreamEvent("report", t, self.state, t0=self.t0, report=report))
            except StvsiError as exc:
                events.append(StreamEvent("error", t, self.state, t0=self.t0, detail=str(exc)))
            dt = self.dt
            self._reset()
            self.dt = dt

        self._since_beat += 1
        if self.heartbeat_every and self._since_beat >= self.heartbeat_every:
            self._since_beat = 0
            events.append(StreamEvent("heartbeat", t, self.state))
        return events


def stream_assess(
    feed: Iterable[tuple[float, float]],
    cfg: AssessConfig = AssessConfig(),
    heartbeat_every: int = 1000,
    source: str = "stream",
) -> Iterator[StreamEvent]:
    """Drive a :class:`StreamAssessor` over ``feed``, yielding its events.

    ``source`` labels the emitted reports.
    """
    assessor = StreamAssessor(cfg, heartbeat_every, source=source)
    for t, v in feed:
        yield from assessor.push(t, v)


def queue_feed(q: "queue.Queue", sentinel=None) -> Iterator[tuple[float, float]]:
    """Drain a bounded queue until ``sentinel``; producers block when it is full."""
    while True:
        item = q.get()
        if item is sentinel:
            return
        yield item
