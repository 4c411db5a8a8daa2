"""Process-based discrete-event simulation core.

Processes are plain Python generators that yield commands (:class:`Hold`,
:class:`Acquire`, :class:`Release`) back to the engine. The engine owns a
single simulation clock and a time-ordered event calendar; ties at equal
times break by insertion order via a monotone sequence counter, so every
run is fully deterministic and can be fingerprinted with a trace digest.
Resources are capacity-limited pools with strict FIFO queueing and
per-grant wait accounting.
"""

from __future__ import annotations

import hashlib
import heapq
import struct
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import count
from typing import Callable, Generator

__all__ = [
    "Acquire",
    "Engine",
    "EngineStats",
    "Hold",
    "PastEventError",
    "Process",
    "ProcessState",
    "Release",
    "Resource",
    "ResourceUsageError",
    "SimulationError",
]


class SimulationError(Exception):
    """A contract violation inside the simulation engine."""


class PastEventError(SimulationError):
    """An event was scheduled (or a run requested) before the current clock."""


class ResourceUsageError(SimulationError):
    """Acquire/release used in a state the resource contract forbids."""


class ProcessState(Enum):
    READY = "ready"
    WAITING_TIME = "waiting-for-time"
    WAITING_RESOURCE = "waiting-for-resource"
    FINISHED = "finished"


class Hold:
    """Suspend the yielding process for ``duration`` simulated seconds."""

    __slots__ = ("duration",)

    def __init__(self, duration: float):
        self.duration = duration


class Acquire:
    """Request one unit of ``resource``; resumes once granted."""

    __slots__ = ("resource",)

    def __init__(self, resource: "Resource"):
        self.resource = resource


class Release:
    """Give back one unit of ``resource`` held by the yielding process."""

    __slots__ = ("resource",)

    def __init__(self, resource: "Resource"):
        self.resource = resource


class Process:
    """Handle for a spawned process; ``state`` tracks its lifecycle."""

    __slots__ = ("id", "name", "state", "_gen")

    def __init__(self, pid: int, name: str, gen: Generator):
        self.id = pid
        self.name = name
        self.state = ProcessState.READY
        self._gen = gen

    def __repr__(self) -> str:
        return f"Process({self.id}, {self.name!r}, {self.state.value})"


@dataclass(frozen=True)
class EngineStats:
    clock: float
    events_executed: int
    processes_spawned: int
    processes_finished: int

    @property
    def processes_in_flight(self) -> int:
        return self.processes_spawned - self.processes_finished


class Resource:
    """Capacity-limited pool with FIFO queueing and wait accounting.

    ``wait_log`` holds one ``(process id, enqueue time, grant time)`` tuple
    per grant, appended in grant order. Grants are strictly FIFO: a unit
    freed by a release transfers to the queue head at the same clock
    instant, so the pool is never idle while someone is waiting.
    """

    __slots__ = ("name", "capacity", "in_use", "wait_log", "_engine", "_queue", "_holders")

    def __init__(self, engine: "Engine", name: str, capacity: int):
        if capacity < 1 or int(capacity) != capacity:
            raise ValueError(f"resource {name!r}: capacity must be a positive integer, got {capacity!r}")
        self.name = name
        self.capacity = int(capacity)
        self.in_use = 0
        self.wait_log: list[tuple[int, float, float]] = []
        self._engine = engine
        self._queue: deque[tuple[Process, float]] = deque()
        self._holders: set[int] = set()

    @property
    def queue_length(self) -> int:
        return len(self._queue)

    def holds(self, process: Process) -> bool:
        return process.id in self._holders

    def _request(self, process: Process, now: float) -> bool:
        """Grant immediately (True) or enqueue FIFO (False)."""
        if process.id in self._holders:
            raise ResourceUsageError(
                f"process {process.name!r} already holds resource {self.name!r}"
            )
        if self.in_use < self.capacity:
            self.in_use += 1
            self._holders.add(process.id)
            self.wait_log.append((process.id, now, now))
            return True
        self._queue.append((process, now))
        return False

    def _release(self, process: Process, now: float) -> None:
        if process.id not in self._holders:
            raise ResourceUsageError(
                f"process {process.name!r} released resource {self.name!r} it does not hold"
            )
        self._holders.remove(process.id)
        if self._queue:
            # Transfer the unit to the queue head at this same instant;
            # in_use is unchanged because the slot never went idle.
            head, enqueued = self._queue.popleft()
            self._holders.add(head.id)
            self.wait_log.append((head.id, enqueued, now))
            self._engine._push(now, head)
        else:
            self.in_use -= 1

    def __repr__(self) -> str:
        return (
            f"Resource({self.name!r}, capacity={self.capacity}, "
            f"in_use={self.in_use}, queued={len(self._queue)})"
        )


class Engine:
    """Simulation clock plus event calendar; drives process generators."""

    def __init__(self) -> None:
        self.now = 0.0
        self.events_executed = 0
        self.processes_spawned = 0
        self.processes_finished = 0
        self._calendar: list[tuple[float, int, object]] = []
        self._seq = count()
        self._hash = hashlib.blake2b(digest_size=16)

    def schedule_at(self, time: float, action: Callable[[], None]) -> int:
        """Schedule ``action`` to run when the clock reaches ``time``.

        Equal-time actions run in insertion order. Scheduling in the past
        is rejected, never clamped.
        """
        return self._push(time, action)

    def schedule_in(self, delay: float, action: Callable[[], None]) -> int:
        return self._push(self.now + delay, action)

    def process(self, gen: Generator, name: str = "") -> Process:
        """Spawn ``gen`` as a process; its first step runs at the current instant."""
        self.processes_spawned += 1
        proc = Process(self.processes_spawned, name or f"process-{self.processes_spawned}", gen)
        self._push(self.now, proc)
        return proc

    def run_until(self, horizon: float) -> EngineStats:
        """Execute all events with time <= ``horizon``.

        Entries scheduled beyond the horizon stay in the calendar;
        processes still suspended remain recorded as in-flight. Calling
        with an empty calendar is a no-op that leaves the clock unchanged;
        otherwise the clock finishes at ``horizon``.
        """
        if horizon < self.now:
            raise PastEventError(f"horizon {horizon} is before current clock {self.now}")
        calendar = self._calendar
        had_entries = bool(calendar)
        pack = struct.pack
        update = self._hash.update
        while calendar and calendar[0][0] <= horizon:
            time, seq, item = heapq.heappop(calendar)
            self.now = time
            update(pack("<dq", time, seq))
            self.events_executed += 1
            if type(item) is Process:
                self._step(item)
            else:
                item()
        if had_entries:
            self.now = horizon
        return self.stats()

    def stats(self) -> EngineStats:
        return EngineStats(
            clock=self.now,
            events_executed=self.events_executed,
            processes_spawned=self.processes_spawned,
            processes_finished=self.processes_finished,
        )

    def trace_digest(self) -> str:
        """Fingerprint of the executed event sequence so far."""
        return self._hash.hexdigest()

    def _push(self, time: float, item: object) -> int:
        if time < self.now:
            raise PastEventError(f"cannot schedule at {time}; clock is already at {self.now}")
        if type(item) is Process and item.state is ProcessState.FINISHED:
            raise SimulationError(f"finished process {item.name!r} cannot re-enter the calendar")
        seq = next(self._seq)
        heapq.heappush(self._calendar, (time, seq, item))
        return seq

    def _step(self, proc: Process) -> None:
        """Advance a process until it suspends (hold/queue) or finishes.

        Immediate grants and releases continue synchronously within the
        current instant; resumptions that need a later wake-up (holds) or
        another process's action (queued acquires) go through the calendar.
        """
        gen = proc._gen
        proc.state = ProcessState.READY
        while True:
            try:
                command = gen.send(None)
            except StopIteration:
                proc.state = ProcessState.FINISHED
                self.processes_finished += 1
                return
            kind = type(command)
            if kind is Hold:
                duration = command.duration
                if duration < 0:
                    raise ValueError(f"process {proc.name!r}: negative hold duration {duration}")
                proc.state = ProcessState.WAITING_TIME
                self._push(self.now + duration, proc)
                return
            if kind is Acquire:
                if command.resource._request(proc, self.now):
                    continue
                proc.state = ProcessState.WAITING_RESOURCE
                return
            if kind is Release:
                command.resource._release(proc, self.now)
                continue
            raise SimulationError(f"process {proc.name!r} yielded unsupported command {command!r}")
