"""Command-line interface: single runs, the full matrix, reports, self-tests.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
The master seed comes from --seed, else the S2S_SIM_SEED environment
variable, else a fixed documented constant, so runs are reproducible by
default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, default_config, load_config
from .engine import SimulationError
from .metrics import (
    ComparisonRow,
    MetricsSummary,
    build_comparison,
    format_report,
)
from .pipeline import ProcessingMode, ResourceConstraint
from .scenarios import (
    BASE_SCENARIO_ID,
    Modulation,
    ReplicationPlan,
    Scenario,
    ScenarioError,
    run_matrix,
    run_scenario,
)
from .stochastic import DEFAULT_MASTER_SEED, distribution_checks

__all__ = ["main"]

SEED_ENV_VAR = "S2S_SIM_SEED"

# Fixed machine-readable schema; rounding happens only in the human report.
CSV_HEADER = [
    "scenario_id",
    "mode",
    "resources",
    "modulation",
    "replication",
    "seed",
    "mean_sat_wait_s",
    "mean_downlink_wait_s",
    "total_wait_min",
    "completed",
    "incomplete",
]

COMPARISON_HEADER = [
    "scenario_id",
    "mode",
    "resources",
    "modulation",
    "replications",
    "total_wait_min",
    "pct_change_vs_base",
    "ci_low_min",
    "ci_high_min",
    "gs_processing_share",
    "completed",
    "incomplete",
]


class UsageError(Exception):
    """Bad flag/environment input detected after argparse."""


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _resolve_seed(flag_value: int | None) -> int:
    if flag_value is not None:
        if flag_value < 0:
            raise UsageError(f"--seed must be a non-negative integer, got {flag_value}")
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV_VAR} must be a decimal integer, got {env!r}") from None
        if value < 0:
            raise UsageError(f"{SEED_ENV_VAR} must be non-negative, got {value}")
        return value
    return DEFAULT_MASTER_SEED


def _load_config(path: str | None):
    return load_config(path) if path else default_config()


def _fmt(value) -> str:
    if value is None:
        return ""
    return str(value)


def _summary_row(summary: MetricsSummary) -> dict:
    return {
        "scenario_id": summary.scenario_id,
        "mode": summary.mode,
        "resources": summary.constraint,
        "modulation": summary.modulation,
        "replication": summary.replication,
        "seed": summary.seed,
        "mean_sat_wait_s": summary.mean_sat_wait_s,
        "mean_downlink_wait_s": summary.mean_downlink_wait_s,
        "total_wait_min": summary.total_wait_min,
        "completed": summary.completed,
        "incomplete": summary.incomplete,
    }


def _mean_or_none(values: list[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return math.fsum(present) / len(present)


def _aggregate_row(summaries: list[MetricsSummary]) -> dict:
    first = summaries[0]
    return {
        "scenario_id": first.scenario_id,
        "mode": first.mode,
        "resources": first.constraint,
        "modulation": first.modulation,
        "replication": "aggregate",
        "seed": "",
        "mean_sat_wait_s": _mean_or_none([s.mean_sat_wait_s for s in summaries]),
        "mean_downlink_wait_s": _mean_or_none([s.mean_downlink_wait_s for s in summaries]),
        "total_wait_min": _mean_or_none([s.total_wait_min for s in summaries]),
        "completed": sum(s.completed for s in summaries),
        "incomplete": sum(s.incomplete for s in summaries),
    }


def _rows_to_csv(rows: list[dict], header: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[column]) for column in header])
    return buffer.getvalue()


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _manifest(args, seed: int, command: str, extra: dict | None = None) -> dict:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "horizon_hours": args.horizon_hours,
        "replications": args.replications,
        "format": args.format,
    }
    if extra:
        manifest.update(extra)
    if not getattr(args, "reproducible", False):
        manifest["timestamp"] = datetime.now(timezone.utc).isoformat()
    return manifest


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_run(args) -> int:
    seed = _resolve_seed(args.seed)
    config = _load_config(args.config)
    scenario = Scenario(
        ProcessingMode(args.mode),
        ResourceConstraint(args.resources),
        Modulation(args.modulation),
    )
    if scenario.mode is not ProcessingMode.GROUND and (
        scenario.constraint is ResourceConstraint.ONE_GROUND_STATION
    ):
        print(
            "warning: onboard modes never use ground stations; the one-gs constraint "
            "is applied but has no effect",
            file=sys.stderr,
        )
    plan = ReplicationPlan(
        replications=args.replications, master_seed=seed, horizon_s=args.horizon_hours * 3600.0
    )
    summaries = run_scenario(scenario, plan, config, deterministic=args.deterministic)
    rows = [_summary_row(s) for s in summaries]
    aggregate = _aggregate_row(summaries)
    if args.format == "csv":
        _write_text(args.out, _rows_to_csv(rows + [aggregate], CSV_HEADER))
    else:
        aggregate = dict(aggregate)
        aggregate["mean_end_to_end_s"] = _mean_or_none([s.mean_end_to_end_s for s in summaries])
        payload = {
            "manifest": _manifest(
                args,
                seed,
                "run",
                {
                    "scenario_id": scenario.id,
                    "deterministic": args.deterministic,
                },
            ),
            "rows": rows,
            "aggregate": aggregate,
        }
        _write_text(args.out, _json_dumps(payload))
    mean_e2e = _mean_or_none([s.mean_end_to_end_s for s in summaries])
    total = _mean_or_none([s.total_wait_min for s in summaries])
    print(
        f"scenario {scenario.id}: {len(summaries)} replication(s), "
        f"mean total wait {'n/a' if total is None else f'{total:.2f}m'}, "
        f"mean end-to-end {'n/a' if mean_e2e is None else f'{mean_e2e:.1f}s'}, "
        f"completed {aggregate['completed']}, in flight {aggregate['incomplete']}",
        file=sys.stderr,
    )
    return 0


def _scenario_filename(scenario_id: str, fmt: str) -> str:
    return scenario_id.replace(":", "_") + "." + fmt


def cmd_matrix(args) -> int:
    seed = _resolve_seed(args.seed)
    config = _load_config(args.config)
    plan = ReplicationPlan(
        replications=args.replications, master_seed=seed, horizon_s=args.horizon_hours * 3600.0
    )
    summaries, failures = run_matrix(plan, config, parallel=args.parallel)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    grouped: dict[str, list[MetricsSummary]] = {}
    for summary in summaries:
        grouped.setdefault(summary.scenario_id, []).append(summary)
    for scenario_id, group in grouped.items():
        rows = [_summary_row(s) for s in group]
        aggregate = _aggregate_row(group)
        path = out_dir / _scenario_filename(scenario_id, args.format)
        if args.format == "csv":
            path.write_text(_rows_to_csv(rows + [aggregate], CSV_HEADER))
        else:
            aggregate = dict(aggregate)
            aggregate["mean_end_to_end_s"] = _mean_or_none([s.mean_end_to_end_s for s in group])
            path.write_text(_json_dumps({"rows": rows, "aggregate": aggregate}))

    comparison_error = None
    try:
        comparison = build_comparison(summaries, BASE_SCENARIO_ID)
    except ValueError as exc:
        comparison_error = str(exc)
        comparison = []
    if comparison:
        comparison_rows = [
            {
                "scenario_id": row.scenario_id,
                "mode": row.mode,
                "resources": row.constraint,
                "modulation": row.modulation,
                "replications": row.replications,
                "total_wait_min": row.total_wait_min,
                "pct_change_vs_base": row.pct_change_vs_base,
                "ci_low_min": row.ci_low_min,
                "ci_high_min": row.ci_high_min,
                "gs_processing_share": row.gs_processing_share,
                "completed": row.completed,
                "incomplete": row.incomplete,
            }
            for row in comparison
        ]
        (out_dir / "comparison.csv").write_text(_rows_to_csv(comparison_rows, COMPARISON_HEADER))
        if args.format == "json":
            (out_dir / "comparison.json").write_text(_json_dumps(comparison_rows))

    manifest = _manifest(
        args,
        seed,
        "matrix",
        {
            "scenarios": len(grouped),
            "failed": [{"scenario_id": sid, "error": msg} for sid, msg in failures],
        },
    )
    (out_dir / "manifest.json").write_text(_json_dumps(manifest))

    if failures:
        for scenario_id, message in failures:
            print(f"error: {message}", file=sys.stderr)
        return 1
    if comparison_error:
        print(f"error: {comparison_error}", file=sys.stderr)
        return 1
    print(
        f"matrix complete: {len(grouped)} scenarios x {plan.replications} replications "
        f"written to {out_dir}",
        file=sys.stderr,
    )
    return 0


def _parse_optional_float(text: str) -> float | None:
    return float(text) if text else None


def _read_comparison(path: Path) -> list[ComparisonRow]:
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != COMPARISON_HEADER:
            raise ValueError(f"{path}: unexpected comparison header {reader.fieldnames}")
        rows = []
        for record in reader:
            rows.append(
                ComparisonRow(
                    scenario_id=record["scenario_id"],
                    mode=record["mode"],
                    constraint=record["resources"],
                    modulation=record["modulation"],
                    replications=int(record["replications"]),
                    total_wait_min=_parse_optional_float(record["total_wait_min"]),
                    pct_change_vs_base=_parse_optional_float(record["pct_change_vs_base"]),
                    ci_low_min=_parse_optional_float(record["ci_low_min"]),
                    ci_high_min=_parse_optional_float(record["ci_high_min"]),
                    gs_processing_share=_parse_optional_float(record["gs_processing_share"]),
                    completed=int(record["completed"]),
                    incomplete=int(record["incomplete"]),
                )
            )
    if not rows:
        raise ValueError(f"{path}: no comparison rows")
    return rows


def cmd_report(args) -> int:
    in_path = Path(args.in_path)
    comparison = in_path if in_path.is_file() else in_path / "comparison.csv"
    rows = _read_comparison(comparison)
    print(format_report(rows))
    return 0


def cmd_validate(args) -> int:
    seed = _resolve_seed(args.seed)
    checks = distribution_checks(samples=args.samples, master_seed=seed)
    failed = [c for c in checks if not c.passed]
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status}  {check.name}: {check.statistic:.6g} (required: {check.requirement})")
    if failed:
        print(f"{len(failed)} of {len(checks)} distribution checks failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s2s-sim",
        description="Discrete-event simulator of a satellite imaging sensor-to-shooter pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="scenario configuration file (key = value lines)")
        p.add_argument("--horizon-hours", type=_positive_float, default=24.0, metavar="H")
        p.add_argument("--replications", type=_positive_int, default=30, metavar="N")
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help=f"master seed (default: ${SEED_ENV_VAR}, else {DEFAULT_MASTER_SEED})",
        )

    run = sub.add_parser("run", help="run one scenario")
    add_common(run)
    run.add_argument("--mode", choices=[m.value for m in ProcessingMode], default="ground")
    run.add_argument(
        "--resources", choices=[c.value for c in ResourceConstraint], default="all"
    )
    run.add_argument(
        "--modulation", choices=[m.value for m in Modulation], default="none"
    )
    run.add_argument("--deterministic", action="store_true", help="pin every draw at its mean")
    run.add_argument("--out", help="output file (default: stdout)")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--reproducible", action="store_true", help="omit timestamps from output")
    run.set_defaults(func=cmd_run)

    matrix = sub.add_parser("matrix", help="run all 36 scenarios")
    add_common(matrix)
    matrix.add_argument("--out-dir", required=True)
    matrix.add_argument("--format", choices=["csv", "json"], default="csv")
    matrix.add_argument("--parallel", type=_positive_int, default=1, metavar="N")
    matrix.add_argument("--reproducible", action="store_true", help="omit timestamps from output")
    matrix.set_defaults(func=cmd_matrix)

    report = sub.add_parser("report", help="render a matrix comparison table")
    report.add_argument(
        "--in", dest="in_path", required=True, help="matrix output directory (or comparison.csv)"
    )
    report.set_defaults(func=cmd_report)

    validate = sub.add_parser("validate", help="statistical self-test of the samplers")
    validate.add_argument("--samples", type=_positive_int, default=100_000, metavar="N")
    validate.add_argument("--seed", type=int, default=None)
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ScenarioError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
