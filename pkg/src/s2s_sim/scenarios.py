"""The 36-cell experiment matrix and seeded replication runner.

A scenario is one (processing mode, resource constraint, modulation)
triple; the full matrix is the 3 x 3 x 4 cartesian product, enumerated in
a fixed order (mode outermost, modulation innermost) so cell ids and seed
derivations are stable. Each replication derives its own 64-bit seed from
(master seed, scenario id, replication index), making every result a pure
function of the plan.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

from .metrics import MetricsSummary, summarize
from .pipeline import (
    ConstellationConfig,
    PipelineResult,
    ProcessingMode,
    ResourceConstraint,
    apply_resource_constraint,
    run_pipeline,
)
from .stochastic import DEFAULT_MASTER_SEED, StreamSet, derive_seed

__all__ = [
    "BASE_SCENARIO_ID",
    "Modulation",
    "ReplicationPlan",
    "Scenario",
    "ScenarioError",
    "apply_modulation",
    "build_matrix",
    "run_matrix",
    "run_replication",
    "run_scenario",
    "scenario_config",
]


class ScenarioError(Exception):
    """A replication failed; the message names scenario, replication, seed."""


class Modulation(str, Enum):
    NONE = "none"
    HALF_IMAGES = "half-images"
    DOUBLE_PROCESSING = "double-processing"
    DOUBLE_SATELLITES = "double-satellites"


@dataclass(frozen=True)
class Scenario:
    """One cell of the experiment matrix."""

    mode: ProcessingMode
    constraint: ResourceConstraint
    modulation: Modulation

    @property
    def id(self) -> str:
        return f"{self.mode.value}:{self.constraint.value}:{self.modulation.value}"


BASE_SCENARIO_ID = "ground:all:none"


def build_matrix() -> list[Scenario]:
    """All 36 scenarios in the documented stable order."""
    return [
        Scenario(mode, constraint, modulation)
        for mode in ProcessingMode
        for constraint in ResourceConstraint
        for modulation in Modulation
    ]


def apply_modulation(config: ConstellationConfig, modulation: Modulation) -> ConstellationConfig:
    """Scale the base configuration for one modulation; NONE is the identity.

    Halving images scales the batch std too, preserving its coefficient of
    variation. Doubling processing doubles all three processing stages so
    the modulation is meaningful in every mode.
    """
    if modulation is Modulation.HALF_IMAGES:
        return replace(
            config,
            batch_size_mean=config.batch_size_mean * 0.5,
            batch_size_std=config.batch_size_std * 0.5,
        )
    if modulation is Modulation.DOUBLE_PROCESSING:
        return replace(
            config,
            gs_processing=config.gs_processing.scaled(2.0),
            onboard_processing=config.onboard_processing.scaled(2.0),
            onboard_sr=config.onboard_sr.scaled(2.0),
        )
    if modulation is Modulation.DOUBLE_SATELLITES:
        return replace(config, num_satellites=config.num_satellites * 2)
    return config


def scenario_config(base: ConstellationConfig, scenario: Scenario) -> ConstellationConfig:
    """Config for one cell: modulation first, then the resource constraint.

    The constraint is applied last so it overrides modulated counts (one
    satellite stays one satellite even under double-satellites).
    """
    return apply_resource_constraint(
        apply_modulation(base, scenario.modulation), scenario.constraint
    )


@dataclass(frozen=True)
class ReplicationPlan:
    """Replication count, master seed, and horizon shared by every cell."""

    replications: int = 30
    master_seed: int = DEFAULT_MASTER_SEED
    horizon_s: float = 86_400.0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.horizon_s <= 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon_s}")


def run_replication(
    scenario: Scenario,
    plan: ReplicationPlan,
    base: ConstellationConfig,
    replication: int,
    *,
    deterministic: bool = False,
    keep_result: bool = False,
) -> tuple[MetricsSummary, PipelineResult | None]:
    """Run one seeded replication of one scenario."""
    config = scenario_config(base, scenario)
    if deterministic:
        config = config.deterministic()
    seed = derive_seed(plan.master_seed, scenario.id, replication)
    streams = StreamSet.from_seed(seed)
    result = run_pipeline(config, scenario.mode, plan.horizon_s, streams)
    summary = summarize(
        result.completed,
        result.generated,
        scenario_id=scenario.id,
        mode=scenario.mode.value,
        constraint=scenario.constraint.value,
        modulation=scenario.modulation.value,
        replication=replication,
        seed=seed,
    )
    return summary, (result if keep_result else None)


def run_scenario(
    scenario: Scenario,
    plan: ReplicationPlan,
    base: ConstellationConfig,
    *,
    deterministic: bool = False,
) -> list[MetricsSummary]:
    """All replications of one scenario, in replication order."""
    summaries = []
    for replication in range(plan.replications):
        try:
            summary, _ = run_replication(
                scenario, plan, base, replication, deterministic=deterministic
            )
        except Exception as exc:
            seed = derive_seed(plan.master_seed, scenario.id, replication)
            raise ScenarioError(
                f"scenario {scenario.id} replication {replication} (seed {seed}) failed: {exc}"
            ) from exc
        summaries.append(summary)
    return summaries


def run_matrix(
    plan: ReplicationPlan,
    base: ConstellationConfig,
    *,
    parallel: int = 1,
    scenarios: list[Scenario] | None = None,
) -> tuple[list[MetricsSummary], list[tuple[str, str]]]:
    """Run every scenario; returns (summaries, failures).

    Summaries are ordered by (matrix position, replication) regardless of
    worker scheduling, so parallel and serial runs produce identical
    output. Failures are (scenario id, diagnostic) pairs.
    """
    cells = build_matrix() if scenarios is None else scenarios
    summaries: list[MetricsSummary] = []
    failures: list[tuple[str, str]] = []
    if parallel <= 1:
        for cell in cells:
            try:
                summaries.extend(run_scenario(cell, plan, base))
            except ScenarioError as exc:
                failures.append((cell.id, str(exc)))
        return summaries, failures
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        futures = [pool.submit(run_scenario, cell, plan, base) for cell in cells]
        for cell, future in zip(cells, futures):
            try:
                summaries.extend(future.result())
            except ScenarioError as exc:
                failures.append((cell.id, str(exc)))
    return summaries, failures
