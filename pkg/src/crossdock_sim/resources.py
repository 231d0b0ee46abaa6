"""Capacity-constrained resources with shift schedules, queues and cost tallies.

A resource is a pool of identical units (two skilled pickers at a point are
one resource with capacity 2).  Service can only start while the schedule
is on-shift and the resource is up; work in progress at a shift boundary is
finished as overtime.  Overtime counts as both busy and scheduled time, so
busy + idle == scheduled holds exactly, with idle derived as the on-shift
time not spent serving.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .engine import END_SERVICE, FAILURE, REPAIR, START_SERVICE, Simulation, SimulationError

__all__ = ["ShiftSchedule", "ALWAYS_ON", "Resource", "ResourceUsage"]


@dataclass(frozen=True)
class ShiftSchedule:
    """On-shift windows within a repeating day.

    windows are (start-minute-of-day, duration) pairs, disjoint and ordered.
    """

    windows: tuple
    day_length: float = 1440.0

    def __post_init__(self) -> None:
        if self.day_length <= 0.0:
            raise ValueError(f"day_length must be > 0, got {self.day_length}")
        if not self.windows:
            raise ValueError("schedule needs at least one on-shift window")
        prev_end = 0.0
        for start, duration in self.windows:
            if duration <= 0.0:
                raise ValueError(f"window duration must be > 0, got {duration}")
            if start < prev_end:
                raise ValueError(f"windows must be disjoint and ordered (window at {start})")
            prev_end = start + duration
        if prev_end > self.day_length:
            raise ValueError(
                f"windows extend to {prev_end}, past day_length {self.day_length}")

    @property
    def minutes_per_day(self) -> float:
        return sum(d for _, d in self.windows)

    def _fold(self, t: float) -> tuple:
        day, offset = divmod(t, self.day_length)
        return day, offset

    def is_on(self, t: float) -> bool:
        _, off = self._fold(t)
        for start, duration in self.windows:
            if start <= off < start + duration:
                return True
        return False

    def next_on(self, t: float) -> float:
        """Earliest time >= t that is on-shift."""
        day, off = self._fold(t)
        for start, duration in self.windows:
            if off < start + duration:
                return day * self.day_length + max(start, off)
        return (day + 1) * self.day_length + self.windows[0][0]

    def _on_before(self, t: float) -> float:
        """On-shift minutes in [0, t)."""
        if t <= 0.0:
            return 0.0
        day, off = self._fold(t)
        partial = 0.0
        for start, duration in self.windows:
            partial += min(max(off - start, 0.0), duration)
        return day * self.minutes_per_day + partial

    def on_minutes(self, t0: float, t1: float) -> float:
        """On-shift minutes in [t0, t1)."""
        if t1 <= t0:
            return 0.0
        return self._on_before(t1) - self._on_before(t0)

    def advance_on(self, t: float, on_minutes: float) -> float:
        """Wall-clock time at which `on_minutes` of on-shift time has passed after t."""
        if on_minutes <= 0.0:
            return t
        if math.isinf(on_minutes):
            return math.inf
        remaining = on_minutes
        per_day = self.minutes_per_day
        cur = t
        # Skip whole days in one step so huge up-times stay O(1).
        if remaining > 2.0 * per_day:
            skip_days = math.floor((remaining - per_day) / per_day)
            cur += skip_days * self.day_length
            remaining -= skip_days * per_day
        while True:
            cur = self.next_on(cur)
            day, off = self._fold(cur)
            window_end = cur
            for start, duration in self.windows:
                if start <= off < start + duration:
                    window_end = day * self.day_length + start + duration
                    break
            available = window_end - cur
            if remaining <= available:
                return cur + remaining
            remaining -= available
            cur = window_end

    def window_starts(self, horizon: float) -> Iterator[float]:
        """Absolute start times of on-shift windows in (0, horizon)."""
        day = 0
        while True:
            base = day * self.day_length
            if base >= horizon:
                return
            for start, _ in self.windows:
                t = base + start
                if 0.0 < t < horizon:
                    yield t
            day += 1

    def as_dict(self) -> dict:
        return {"windows": [list(w) for w in self.windows], "day_length": self.day_length}


ALWAYS_ON = ShiftSchedule(windows=((0.0, 1440.0),))


@dataclass
class _Allocation:
    entity: object
    start: float
    planned_end: float
    on_done: Optional[Callable]


@dataclass
class ResourceUsage:
    """Final accounting for one resource over a replication."""

    name: str
    capacity: int
    busy_minutes: float
    idle_minutes: float
    scheduled_minutes: float
    use_count: int
    busy_rate: float
    idle_rate: float
    per_use: float
    failures: int = 0


class Resource:
    """A pool of interchangeable service units bound to one simulation."""

    def __init__(self, sim: Simulation, name: str, capacity: int, schedule: ShiftSchedule,
                 busy_rate: float = 0.0, idle_rate: float = 0.0, per_use: float = 0.0):
        if capacity < 1:
            raise ValueError(f"resource {name!r} needs capacity >= 1, got {capacity}")
        self.sim = sim
        self.name = name
        self.capacity = capacity
        self.schedule = schedule
        self.busy_rate = busy_rate
        self.idle_rate = idle_rate
        self.per_use = per_use

        self._in_service: dict = {}
        self.queue: deque = deque()
        self.failed = False
        self._fail_pending = False

        self.busy_minutes = 0.0
        self.overtime_minutes = 0.0
        self.use_count = 0
        self.failure_count = 0

        # Hooks the model wires up: called when a unit frees / when a pending
        # failure engages (so the model can schedule the repair).
        self.on_freed: Optional[Callable[["Resource"], None]] = None
        self.on_failure_engaged: Optional[Callable[["Resource"], None]] = None

    # -- state queries ----------------------------------------------------

    @property
    def in_service_count(self) -> int:
        return len(self._in_service)

    def has_free_unit(self) -> bool:
        return self.in_service_count < self.capacity

    def available(self) -> bool:
        return (self.has_free_unit() and not self.failed
                and self.schedule.is_on(self.sim.clock))

    def holds(self, entity) -> bool:
        return id(entity) in self._in_service

    # -- service ----------------------------------------------------------

    def try_start(self, entity, duration: float, on_done: Optional[Callable] = None) -> bool:
        """Start service now if a unit is free and on-shift; never queues."""
        if self.holds(entity):
            raise SimulationError(f"{entity!r} already holds resource {self.name!r}")
        if not self.available():
            return False
        self._start(entity, duration, on_done)
        return True

    def seize(self, entity, duration: float, on_done: Optional[Callable] = None) -> None:
        """Start service now or join this resource's FIFO queue."""
        if not self.try_start(entity, duration, on_done):
            self.queue.append((entity, duration, on_done))
            self.sim.trace("queue-join", self.name, f"{_label(entity)} waits")

    def _start(self, entity, duration: float, on_done: Optional[Callable]) -> None:
        clock = self.sim.clock
        self._in_service[id(entity)] = _Allocation(entity, clock, clock + duration, on_done)
        self.use_count += 1
        self.sim.trace(START_SERVICE, self.name, f"{_label(entity)} service {duration:.4f} min")
        self.sim.schedule(clock + duration, END_SERVICE, self.name,
                          lambda: self._end_service(entity, clock + duration))

    def _end_service(self, entity, planned_end: float) -> None:
        alloc = self._in_service.get(id(entity))
        if alloc is None or alloc.planned_end != planned_end:
            return  # stale event; the entity was released early
        self.release(entity)

    def release(self, entity) -> None:
        """Free the unit held by entity; accrue busy and overtime time."""
        alloc = self._in_service.pop(id(entity), None)
        if alloc is None:
            raise SimulationError(
                f"release of resource {self.name!r} by {_label(entity)}, which does not hold it")
        clock = self.sim.clock
        held = clock - alloc.start
        self.busy_minutes += held
        self.overtime_minutes += held - self.schedule.on_minutes(alloc.start, clock)
        self.sim.trace(END_SERVICE, self.name, f"{_label(entity)} done after {held:.4f} min")
        if alloc.on_done is not None:
            alloc.on_done(entity)
        if self._fail_pending and not self._in_service:
            self._engage_failure()
        else:
            self.drain()
        if self.on_freed is not None:
            self.on_freed(self)

    def drain(self) -> None:
        """Move queued requests into service while units are available."""
        while self.queue and self.available():
            entity, duration, on_done = self.queue.popleft()
            self._start(entity, duration, on_done)

    # -- failure / repair -------------------------------------------------

    def fail(self) -> None:
        """Break the resource; in-progress service finishes first."""
        if self.failed or self._fail_pending:
            return
        if self._in_service:
            self._fail_pending = True
            self.sim.trace(FAILURE, self.name, "failure pending until current service ends")
        else:
            self._engage_failure()

    def _engage_failure(self) -> None:
        self._fail_pending = False
        self.failed = True
        self.failure_count += 1
        self.sim.trace(FAILURE, self.name, "down for repair")
        if self.on_failure_engaged is not None:
            self.on_failure_engaged(self)

    def repair(self) -> None:
        if not self.failed:
            raise SimulationError(f"repair of resource {self.name!r}, which is not failed")
        self.failed = False
        self.sim.trace(REPAIR, self.name, "back up")
        self.drain()
        if self.on_freed is not None:
            self.on_freed(self)

    # -- accounting -------------------------------------------------------

    def scheduled_minutes(self, length: float) -> float:
        return self.capacity * self.schedule.on_minutes(0.0, length) + self.overtime_minutes

    def idle_minutes(self, length: float) -> float:
        return self.scheduled_minutes(length) - self.busy_minutes

    def usage(self, length: float) -> ResourceUsage:
        return ResourceUsage(
            name=self.name,
            capacity=self.capacity,
            busy_minutes=self.busy_minutes,
            idle_minutes=self.idle_minutes(length),
            scheduled_minutes=self.scheduled_minutes(length),
            use_count=self.use_count,
            busy_rate=self.busy_rate,
            idle_rate=self.idle_rate,
            per_use=self.per_use,
            failures=self.failure_count,
        )


def _label(entity) -> str:
    return getattr(entity, "label", None) or str(entity)
