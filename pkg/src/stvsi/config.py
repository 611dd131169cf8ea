"""Assessment configuration shared by calibration and the pipeline."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Optional

from .divergence import DEFAULT_BINS, OSCILLATION_SHIFT, RESIDUAL_SHIFT
from .emd import EmdConfig


@dataclass(frozen=True)
class AssessConfig:
    window_duration: float = 3.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    recovery_threshold: Optional[float] = None
    oscillation_threshold: float = 1.0
    epsilon: float = 0.02
    oscillation_epsilon: float = 0.0
    emd: EmdConfig = field(default_factory=EmdConfig)
    deriv_method: Literal["central-difference", "local-polynomial"] = "local-polynomial"
    bin_count: int = DEFAULT_BINS
    t0: Optional[float] = None
    dip_threshold: float = 0.7
    clear_slope: float = 0.01
    depth_tol: float = 0.1
    residual_shift: float = RESIDUAL_SHIFT
    oscillation_shift: float = OSCILLATION_SHIFT
    magnitude: Literal["envelope", "raw"] = "envelope"
    per_imf: bool = False  # also score each IMF separately (diagnostic only)

    def __post_init__(self):
        if self.window_duration <= 0:
            raise ValueError("window_duration must be positive")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("gamma1 and gamma2 must be positive")
        if self.epsilon < 0 or self.oscillation_epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.recovery_threshold is not None and self.recovery_threshold <= 0:
            raise ValueError("recovery_threshold must be positive")
        if self.bin_count < 1:
            raise ValueError("bin_count must be >= 1")

    def with_calibration(self, cal) -> "AssessConfig":
        return replace(
            self, gamma1=cal.gamma1, recovery_threshold=cal.d_critical_r, epsilon=cal.epsilon
        )

    def replace(self, **changes) -> "AssessConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)
