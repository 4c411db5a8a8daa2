"""Sensor-to-shooter imaging pipeline processes.

Image requests arrive in periodic batches, compete for a satellite pool,
and are delivered through one of three flows: ground-station processing,
onboard processing, or onboard processing with a super-resolution pass.
Each request record carries its full timestamp chain, from which stage
waits are derived.

Resource-holding semantics: a satellite is occupied from grant through
the uplink and imaging stages (released after the picture in ground mode;
held through processing and the shooter downlink in onboard modes). A
ground station is occupied from grant through link, processing, and the
shooter downlink.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .engine import Acquire, Engine, Hold, Release, Resource
from .stochastic import DistributionSpec, StreamSet, sample_batch_size

__all__ = [
    "ConstellationConfig",
    "ImageRequest",
    "PipelineResult",
    "ProcessingMode",
    "ResourceConstraint",
    "apply_resource_constraint",
    "generate_requests",
    "run_ground_flow",
    "run_onboard_flow",
    "run_pipeline",
]


class ProcessingMode(str, Enum):
    GROUND = "ground"
    ONBOARD = "onboard"
    ONBOARD_SR = "onboard-sr"


class ResourceConstraint(str, Enum):
    ALL = "all"
    ONE_SATELLITE = "one-sat"
    ONE_GROUND_STATION = "one-gs"


@dataclass(frozen=True)
class ConstellationConfig:
    """Constellation sizes, request arrival pattern, and stage durations.

    All durations are in seconds of simulated time.
    """

    num_satellites: int = 3
    num_ground_stations: int = 5
    request_interval_s: float = 1800.0
    batch_size_mean: float = 20.0
    batch_size_std: float = 5.0
    data_transfer_to_sat: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.normal_truncated(30.0, 6.0)
    )
    time_to_picture: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.exponential(240.0)
    )
    gs_link: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.exponential(180.0)
    )
    gs_processing: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.deterministic(3.0)
    )
    downlink_to_shooter: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.normal_truncated(6.0, 0.6)
    )
    onboard_to_shooter: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.deterministic(6.0)
    )
    onboard_processing: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.deterministic(6.0)
    )
    onboard_sr: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.deterministic(6.0)
    )

    def __post_init__(self) -> None:
        if self.num_satellites < 1:
            raise ValueError(f"num_satellites must be >= 1, got {self.num_satellites}")
        if self.num_ground_stations < 1:
            raise ValueError(f"num_ground_stations must be >= 1, got {self.num_ground_stations}")
        if self.request_interval_s <= 0:
            raise ValueError(f"request_interval_s must be > 0, got {self.request_interval_s}")
        if self.batch_size_mean < 0 or self.batch_size_std < 0:
            raise ValueError("batch size mean and std must be >= 0")

    def deterministic(self) -> "ConstellationConfig":
        """Zero-variance copy: every stage pinned at its mean, batch std 0."""
        return replace(
            self,
            batch_size_std=0.0,
            data_transfer_to_sat=self.data_transfer_to_sat.as_deterministic(),
            time_to_picture=self.time_to_picture.as_deterministic(),
            gs_link=self.gs_link.as_deterministic(),
            gs_processing=self.gs_processing.as_deterministic(),
            downlink_to_shooter=self.downlink_to_shooter.as_deterministic(),
            onboard_to_shooter=self.onboard_to_shooter.as_deterministic(),
            onboard_processing=self.onboard_processing.as_deterministic(),
            onboard_sr=self.onboard_sr.as_deterministic(),
        )


def apply_resource_constraint(
    config: ConstellationConfig, constraint: ResourceConstraint
) -> ConstellationConfig:
    """Reduce one resource pool to a single asset; ``ALL`` is the identity."""
    if constraint is ResourceConstraint.ONE_SATELLITE:
        return replace(config, num_satellites=1)
    if constraint is ResourceConstraint.ONE_GROUND_STATION:
        return replace(config, num_ground_stations=1)
    return config


@dataclass(slots=True)
class ImageRequest:
    """Lifecycle record of one image request.

    Timestamps are None until the corresponding stage completes; a request
    with ``t_delivered`` unset was still in flight when the run stopped.
    """

    id: int
    mode: ProcessingMode
    t_created: float
    t_sat_enqueued: float | None = None
    t_sat_granted: float | None = None
    t_picture_done: float | None = None
    t_downlink_enqueued: float | None = None
    t_downlink_granted: float | None = None
    t_delivered: float | None = None

    @property
    def completed(self) -> bool:
        return self.t_delivered is not None

    @property
    def sat_wait(self) -> float:
        return self.t_sat_granted - self.t_sat_enqueued

    @property
    def downlink_wait(self) -> float:
        return self.t_downlink_granted - self.t_downlink_enqueued

    @property
    def end_to_end(self) -> float:
        return self.t_delivered - self.t_created

    @property
    def gs_busy(self) -> float:
        """Time this request occupied a ground station (0 off ground mode)."""
        if self.mode is not ProcessingMode.GROUND or not self.completed:
            return 0.0
        return self.t_delivered - self.t_downlink_granted

    @property
    def stage(self) -> str:
        """Last stage this request completed; useful for in-flight diagnostics."""
        if self.t_delivered is not None:
            return "delivered"
        if self.t_downlink_granted is not None:
            return "downlinking"
        if self.t_picture_done is not None:
            return "awaiting-downlink"
        if self.t_sat_granted is not None:
            return "imaging"
        if self.t_sat_enqueued is not None:
            return "queued-for-satellite"
        return "created"

    def timestamp_chain(self) -> list[float]:
        """The populated timestamps, in lifecycle order."""
        chain = [
            self.t_created,
            self.t_sat_enqueued,
            self.t_sat_granted,
            self.t_picture_done,
            self.t_downlink_enqueued,
            self.t_downlink_granted,
            self.t_delivered,
        ]
        return [t for t in chain if t is not None]


def run_ground_flow(
    engine: Engine,
    request: ImageRequest,
    sats: Resource,
    ground_stations: Resource,
    config: ConstellationConfig,
    streams: StreamSet,
):
    """One request through satellite imaging and ground-station delivery."""
    request.t_sat_enqueued = engine.now
    yield Acquire(sats)
    request.t_sat_granted = engine.now
    transfer = config.data_transfer_to_sat.sample(streams.transfer_to_sat)
    picture = config.time_to_picture.sample(streams.time_to_picture)
    yield Hold(transfer + picture)
    request.t_picture_done = engine.now
    yield Release(sats)
    request.t_downlink_enqueued = engine.now
    yield Acquire(ground_stations)
    request.t_downlink_granted = engine.now
    link = config.gs_link.sample(streams.gs_link)
    processing = config.gs_processing.sample(None)
    shooter = config.downlink_to_shooter.sample(streams.downlink_to_shooter)
    yield Hold(link + processing + shooter)
    yield Release(ground_stations)
    request.t_delivered = engine.now


def run_onboard_flow(
    engine: Engine,
    request: ImageRequest,
    sats: Resource,
    with_sr: bool,
    config: ConstellationConfig,
    streams: StreamSet,
):
    """One request processed on the satellite and downlinked to the shooter.

    No ground station is involved; the downlink wait is 0 by construction,
    stamped at the instant onboard processing begins.
    """
    request.t_sat_enqueued = engine.now
    yield Acquire(sats)
    request.t_sat_granted = engine.now
    transfer = config.data_transfer_to_sat.sample(streams.transfer_to_sat)
    picture = config.time_to_picture.sample(streams.time_to_picture)
    yield Hold(transfer + picture)
    request.t_picture_done = engine.now
    request.t_downlink_enqueued = engine.now
    request.t_downlink_granted = engine.now
    processing = config.onboard_processing.sample(None)
    sr = config.onboard_sr.sample(None) if with_sr else 0.0
    shooter = config.onboard_to_shooter.sample(None)
    yield Hold(processing + sr + shooter)
    yield Release(sats)
    request.t_delivered = engine.now


def generate_requests(
    engine: Engine,
    config: ConstellationConfig,
    horizon_s: float,
    mode: ProcessingMode,
    sats: Resource,
    ground_stations: Resource,
    streams: StreamSet,
    requests_out: list[ImageRequest],
):
    """Emit a request batch at t = 0, interval, 2*interval, ... < horizon.

    Every request in a batch enqueues for the satellite pool at the batch
    instant, in id order.
    """
    next_id = 0
    while True:
        size = sample_batch_size(config.batch_size_mean, config.batch_size_std, streams.batch_size)
        for _ in range(size):
            request = ImageRequest(id=next_id, mode=mode, t_created=engine.now)
            next_id += 1
            requests_out.append(request)
            if mode is ProcessingMode.GROUND:
                flow = run_ground_flow(engine, request, sats, ground_stations, config, streams)
            else:
                flow = run_onboard_flow(
                    engine, request, sats, mode is ProcessingMode.ONBOARD_SR, config, streams
                )
            engine.process(flow, name=f"request-{request.id}")
        yield Hold(config.request_interval_s)
        if engine.now >= horizon_s:
            return


@dataclass
class PipelineResult:
    """Everything observable from one pipeline run."""

    requests: list[ImageRequest]
    satellites: Resource
    ground_stations: Resource
    engine: Engine

    @property
    def generated(self) -> int:
        return len(self.requests)

    @property
    def completed(self) -> list[ImageRequest]:
        return [r for r in self.requests if r.completed]

    @property
    def incomplete(self) -> int:
        return sum(1 for r in self.requests if not r.completed)


def run_pipeline(
    config: ConstellationConfig,
    mode: ProcessingMode,
    horizon_s: float,
    streams: StreamSet,
) -> PipelineResult:
    """Run one replication of the pipeline to the horizon."""
    if horizon_s <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon_s}")
    engine = Engine()
    sats = Resource(engine, "satellites", config.num_satellites)
    ground_stations = Resource(engine, "ground-stations", config.num_ground_stations)
    requests: list[ImageRequest] = []
    engine.process(
        generate_requests(engine, config, horizon_s, mode, sats, ground_stations, streams, requests),
        name="request-source",
    )
    engine.run_until(horizon_s)
    return PipelineResult(
        requests=requests, satellites=sats, ground_stations=ground_stations, engine=engine
    )
