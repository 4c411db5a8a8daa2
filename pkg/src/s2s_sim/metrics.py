"""Per-scenario metric aggregation and base-case comparison.

The headline number, "total wait", is the mean per-request wait for a
satellite plus the mean per-request wait for a downlink slot, expressed
in minutes. Requests still in flight at the horizon are censored from
wait means and reported in a separate incomplete tally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .pipeline import ImageRequest, ProcessingMode

__all__ = [
    "ComparisonRow",
    "MetricsSummary",
    "bottleneck_share",
    "build_comparison",
    "format_report",
    "mean_ci",
    "percent_change",
    "summarize",
]

# Normal-approximation quantile for two-sided 95% intervals.
Z95 = 1.96

REPORT_NOTES = (
    "total wait = mean satellite wait + mean downlink wait over completed requests;"
    " in-flight requests at the horizon are censored and tallied as incomplete",
    "onboard flows bypass ground stations, so their downlink wait is 0 by construction",
)


@dataclass(frozen=True)
class MetricsSummary:
    """Aggregated wait metrics for one scenario replication.

    Wait fields are None (reported as absent, not zero) when no request
    completed within the horizon.
    """

    scenario_id: str
    mode: str
    constraint: str
    modulation: str
    replication: int
    seed: int
    mean_sat_wait_s: float | None
    mean_downlink_wait_s: float | None
    total_wait_min: float | None
    mean_end_to_end_s: float | None
    gs_processing_share: float | None
    completed: int
    incomplete: int
    generated: int


def summarize(
    completed: Sequence[ImageRequest],
    generated: int,
    *,
    scenario_id: str = "",
    mode: str = "",
    constraint: str = "",
    modulation: str = "",
    replication: int = 0,
    seed: int = 0,
) -> MetricsSummary:
    """Reduce completed request records to a MetricsSummary.

    Uses ``math.fsum`` so results are invariant under record permutation.
    """
    n = len(completed)
    if n == 0:
        return MetricsSummary(
            scenario_id=scenario_id,
            mode=mode,
            constraint=constraint,
            modulation=modulation,
            replication=replication,
            seed=seed,
            mean_sat_wait_s=None,
            mean_downlink_wait_s=None,
            total_wait_min=None,
            mean_end_to_end_s=None,
            gs_processing_share=None,
            completed=0,
            incomplete=generated,
            generated=generated,
        )
    mean_sat = math.fsum(r.sat_wait for r in completed) / n
    mean_down = math.fsum(r.downlink_wait for r in completed) / n
    total_e2e = math.fsum(r.end_to_end for r in completed)
    share = math.fsum(r.gs_busy for r in completed) / total_e2e if total_e2e > 0 else 0.0
    return MetricsSummary(
        scenario_id=scenario_id,
        mode=mode,
        constraint=constraint,
        modulation=modulation,
        replication=replication,
        seed=seed,
        mean_sat_wait_s=mean_sat,
        mean_downlink_wait_s=mean_down,
        total_wait_min=(mean_sat + mean_down) / 60.0,
        mean_end_to_end_s=total_e2e / n,
        gs_processing_share=share,
        completed=n,
        incomplete=generated - n,
        generated=generated,
    )


def percent_change(value: float, base: float) -> float:
    """Signed percent change of ``value`` relative to ``base``."""
    if base <= 0:
        raise ValueError(f"percent change needs a positive base, got {base}")
    return 100.0 * (value - base) / base


def mean_ci(values: Sequence[float], z: float = Z95) -> tuple[float, float, float]:
    """Mean and normal-approximation confidence interval over replications."""
    if not values:
        raise ValueError("cannot aggregate an empty sequence")
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, mean, mean
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    half = z * math.sqrt(variance / n)
    return mean, mean - half, mean + half


@dataclass(frozen=True)
class ComparisonRow:
    """One scenario's replication-averaged metrics versus the base case."""

    scenario_id: str
    mode: str
    constraint: str
    modulation: str
    replications: int
    total_wait_min: float | None
    pct_change_vs_base: float | None
    ci_low_min: float | None
    ci_high_min: float | None
    gs_processing_share: float | None
    completed: int
    incomplete: int


def build_comparison(
    summaries: Iterable[MetricsSummary], base_scenario_id: str
) -> list[ComparisonRow]:
    """Replication-average each scenario and compute percent change vs base.

    Rows keep the order scenarios first appear in ``summaries``. Raises if
    the base scenario is absent or never completed a request.
    """
    grouped: dict[str, list[MetricsSummary]] = {}
    for summary in summaries:
        grouped.setdefault(summary.scenario_id, []).append(summary)
    if base_scenario_id not in grouped:
        raise ValueError(f"base scenario {base_scenario_id!r} missing from results")

    def scenario_mean(group: list[MetricsSummary]) -> tuple[float, float, float] | None:
        totals = [s.total_wait_min for s in group if s.total_wait_min is not None]
        if not totals:
            return None
        return mean_ci(totals)

    base_stats = scenario_mean(grouped[base_scenario_id])
    if base_stats is None:
        raise ValueError(f"base scenario {base_scenario_id!r} has no completed requests")
    base_total = base_stats[0]

    rows = []
    for scenario_id, group in grouped.items():
        stats = scenario_mean(group)
        shares = [s.gs_processing_share for s in group if s.gs_processing_share is not None]
        share = math.fsum(shares) / len(shares) if shares else None
        if stats is None:
            total = low = high = pct = None
        else:
            total, low, high = stats
            pct = percent_change(total, base_total)
        first = group[0]
        rows.append(
            ComparisonRow(
                scenario_id=scenario_id,
                mode=first.mode,
                constraint=first.constraint,
                modulation=first.modulation,
                replications=len(group),
                total_wait_min=total,
                pct_change_vs_base=pct,
                ci_low_min=low,
                ci_high_min=high,
                gs_processing_share=share,
                completed=sum(s.completed for s in group),
                incomplete=sum(s.incomplete for s in group),
            )
        )
    return rows


def bottleneck_share(rows: Iterable[ComparisonRow]) -> tuple[float, float] | None:
    """Min/max ground-processing share over ground-mode rows, in percent.

    Returns None when no ground-mode rows carry a share (the report
    fragment is then omitted).
    """
    shares = [
        row.gs_processing_share
        for row in rows
        if row.mode == ProcessingMode.GROUND.value and row.gs_processing_share is not None
    ]
    if not shares:
        return None
    return 100.0 * min(shares), 100.0 * max(shares)


def format_report(rows: Sequence[ComparisonRow]) -> str:
    """Human-readable comparison table plus the bottleneck-share line."""
    lines = [
        f"{'scenario':<42} {'total wait':>10} {'vs base':>9} {'95% CI (min)':>18} {'reps':>5}"
    ]
    for row in rows:
        if row.total_wait_min is None:
            wait = "n/a"
            pct = "n/a"
            ci = ""
        else:
            wait = f"{row.total_wait_min:.1f}m"
            pct = f"{row.pct_change_vs_base:+.2f}%"
            ci = f"[{row.ci_low_min:.1f}, {row.ci_high_min:.1f}]"
        lines.append(f"{row.scenario_id:<42} {wait:>10} {pct:>9} {ci:>18} {row.replications:>5}")
    share_range = bottleneck_share(rows)
    if share_range is not None:
        low, high = share_range
        lines.append("")
        lines.append(
            f"ground-station processing occupies {low:.1f}% to {high:.1f}% of the time"
            " (share of end-to-end, ground-mode scenarios)"
        )
    lines.append("")
    for note in REPORT_NOTES:
        lines.append(f"note: {note}")
    return "\n".join(lines)
