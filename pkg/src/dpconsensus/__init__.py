"""Dynamic average consensus under persistent Laplace privacy noise.

A library and simulator for multi-agent tracking of a time-varying average
reference signal when every shared message is perturbed for privacy.  The
robust update combines a decaying inter-agent coupling weight with a
forgetting stepsize, so the injected noise is attenuated while the network
still tracks the exact average; the accountant bounds the cumulative
privacy budget of an entire run and can calibrate the noise schedule to
any target budget.
"""

from .accountant import (
    DivergentShapeRatio,
    IncompatibleNoiseGrowth,
    PrivacyLedger,
    RatioSumEstimate,
    calibrate_noise_scale,
    ratio_sum,
    sensitivity_bound,
)
from .config import ExperimentConfig, build_schedule, build_signal, build_topology_from_spec, load_config
from .engine import (
    AlgorithmKind,
    ConsensusState,
    DimensionMismatch,
    ObservationRecord,
    SimulationResult,
    init_state,
    mean_state,
    simulate,
    step_conventional,
    step_geometric,
    step_robust,
)
from .metrics import (
    EnsembleSummary,
    MetricsRow,
    MismatchedGrids,
    RunRecord,
    RunRecorder,
    SummabilityDiagnostics,
    aggregate,
    diagnose_summability,
    record_round,
)
from .noise import NoiseChannel, NonpositiveScale, ZeroChannel, channel_for_run, laplace_std
from .runner import run_experiment, run_single
from .schedules import (
    Geometric,
    PastTableEnd,
    PowerLaw,
    PowerLawDenom,
    PowerLawShifted,
    Schedule,
    ScheduleReport,
    Table,
    validate_noise_compatibility,
    validate_tracking_conditions,
)
from .signals import (
    ConstantSignal,
    DampedSinusoidSignal,
    DriftCertificate,
    SignalSpec,
    TableSignal,
    ZeroDriftScale,
    certify_drift,
)
from .topology import (
    DisconnectedGraph,
    InvalidEdge,
    OffDiagonalTopology,
    ParameterOutOfRange,
    SpectralConditionViolated,
    Topology,
    build_topology,
    complete_topology,
    contraction_norm,
    off_diagonal,
    path_topology,
    ring_topology,
    spectral_gap,
)
from .validation import ValidationFailed, ValidationReport, resolve_experiment, validate_experiment

__version__ = "0.1.0"
