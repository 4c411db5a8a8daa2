"""Discrete-event simulator of a satellite imaging sensor-to-shooter pipeline.

The library layers are importable on their own: a generic process-based
simulation engine (:mod:`s2s_sim.engine`), seeded random variates
(:mod:`s2s_sim.stochastic`), the imaging pipeline processes
(:mod:`s2s_sim.pipeline`), the 36-cell experiment matrix
(:mod:`s2s_sim.scenarios`), and metric aggregation/reporting
(:mod:`s2s_sim.metrics`). The ``s2s-sim`` console script in
:mod:`s2s_sim.cli` ties them together.
"""

from .engine import (
    Acquire,
    Engine,
    EngineStats,
    Hold,
    PastEventError,
    Process,
    ProcessState,
    Release,
    Resource,
    ResourceUsageError,
    SimulationError,
)
from .stochastic import (
    DEFAULT_MASTER_SEED,
    DistKind,
    DistributionSpec,
    RngStream,
    StreamSet,
    derive_seed,
    distribution_checks,
    sample_batch_size,
    sample_exponential,
    sample_truncated_normal,
)
from .pipeline import (
    ConstellationConfig,
    ImageRequest,
    PipelineResult,
    ProcessingMode,
    ResourceConstraint,
    apply_resource_constraint,
    run_pipeline,
)
from .scenarios import (
    BASE_SCENARIO_ID,
    Modulation,
    ReplicationPlan,
    Scenario,
    ScenarioError,
    apply_modulation,
    build_matrix,
    run_matrix,
    run_replication,
    run_scenario,
    scenario_config,
)
from .metrics import (
    ComparisonRow,
    MetricsSummary,
    bottleneck_share,
    build_comparison,
    format_report,
    mean_ci,
    percent_change,
    summarize,
)
from .config import ConfigError, default_config, load_config

__version__ = "0.1.0"
