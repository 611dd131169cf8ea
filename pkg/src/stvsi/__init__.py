"""Short-term voltage stability indices from post-fault voltage trajectories."""
from .calibration import (
    CalibrationResult,
    Verdict,
    analysis_window,
    classify,
    degree_of_stability,
    tune_gamma1,
)
from .config import AssessConfig
from .divergence import (
    EmpiricalDistribution,
    GompertzReference,
    IndexValue,
    empirical_distribution,
    kl_divergence,
    oscillation_index,
    recovery_index,
    reference_distribution,
    step1_index,
)
from .emd import Decomposition, EmdConfig, Imf, decompose, decompose_values, sift
from .errors import (
    InputError,
    NoFaultDetected,
    NoFeasibleGamma,
    StvsiError,
)
from .lyapunov import LESeries, LESampleSet, classic_le_verdict, le_samples, le_series
from .pipeline import (
    BatchItem,
    StabilityReport,
    StreamAssessor,
    StreamEvent,
    assess,
    assess_batch,
    stream_assess,
)
from .scenarios import BoundaryPair, ScenarioSpec, closed_form_recovery_index, gen, gen_boundary_pair
from .trajectory import (
    AnalysisWindow,
    VoltageTrajectory,
    detect_fault_clearing,
    differentiate,
    estimate_derivative,
    extract_window,
    load_csv,
    read_csv,
    write_csv,
)

__version__ = "0.1.0"
