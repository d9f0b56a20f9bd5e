"""Space-time adaptive processing simulator.

Reduced-rank sidelobe cancellers with per-snapshot basis selection, classic
reference filters, detection metrics, and a seeded Monte-Carlo harness with
CSV and figure output.
"""

from .abfa import (
    AbfaRlsFilter,
    AbfaSgFilter,
    BasisBank,
    FilterDivergence,
    SidelobeCanceller,
    branch_outputs,
    build_basis_bank,
    effective_full_weight,
    select_branch,
)
from .baselines import (
    AvfState,
    DegenerateTrainingData,
    MswfState,
    SampleCovariance,
    avf_train,
    avf_weight,
    full_rank_rls,
    full_rank_sg,
    mswf_train,
    mswf_weight,
    smi_weight,
)
from .config import ConfigError, load_experiment, load_scenario
from .harness import (
    AlgorithmSpec,
    ExperimentConfig,
    RunResult,
    emit_csv,
    run_experiment,
)
from .matio import read_complex_matrix, write_complex_matrix
from .metrics import (
    ComplexityReport,
    DetectionPoint,
    SinrPoint,
    complexity_count,
    complexity_table,
    detection_point,
    optimum_sinr,
    output_sinr,
    pfa_to_beta,
    prob_detection,
)
from .scene import (
    CovarianceSet,
    RadarScenario,
    Snapshot,
    SteeringVector,
    assemble_covariance,
    clutter_covariance,
    draw_interference,
    draw_snapshot,
    jammer_covariance,
    space_time_steering,
    spatial_steering,
    target_steering,
    temporal_steering,
)

__version__ = "0.1.0"
