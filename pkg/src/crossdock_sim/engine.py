"""Discrete-event kernel: simulation clock, future-event list, trace log.

The future-event list is a binary heap keyed on (time, insertion sequence),
so simultaneous events dispatch in the order they were scheduled.  That
total order is what makes a replication a deterministic function of its
configuration and seeds.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, List, Optional

__all__ = ["EventRecord", "TraceEvent", "Tracer", "Simulation", "SimulationError",
           "ARRIVAL", "START_SERVICE", "END_SERVICE", "SHIFT_CHANGE", "FAILURE",
           "REPAIR", "END_REPLICATION"]

# Event kind tags. Trace lines reuse these, plus a few entity-lifecycle tags
# emitted by the model (create, dispose, buffer-enter, buffer-exit, queue-join).
ARRIVAL = "arrival"
START_SERVICE = "start-service"
END_SERVICE = "end-service"
SHIFT_CHANGE = "shift-change"
FAILURE = "failure"
REPAIR = "repair"
END_REPLICATION = "end-replication"


class SimulationError(RuntimeError):
    """A kernel-level contract violation; the replication must halt."""


@dataclass(frozen=True)
class EventRecord:
    """One scheduled event as seen by the kernel."""

    time: float
    sequence: int
    kind: str
    subject: str


@dataclass(frozen=True)
class TraceEvent:
    """One human-readable trace line, emitted at dispatch time."""

    time: float
    kind: str
    subject: str
    text: str

    def line(self) -> str:
        return f"{self.time:.6f}\t{self.kind}\t{self.subject}\t{self.text}"


class Tracer:
    """Collects trace events in dispatch order."""

    def __init__(self) -> None:
        self.events: List[TraceEvent] = []

    def emit(self, time: float, kind: str, subject: str, text: str) -> None:
        self.events.append(TraceEvent(time, kind, subject, text))

    def lines(self) -> List[str]:
        return [ev.line() for ev in self.events]

    def write(self, fh) -> None:
        for ev in self.events:
            fh.write(ev.line() + "\n")


class Simulation:
    """Event-scheduling kernel for one replication.

    Events carry an action callback; ``run`` drains the future-event list
    until it is empty or the next event lies beyond the replication length.
    """

    def __init__(self, length: float, tracer: Optional[Tracer] = None):
        if length <= 0.0:
            raise ValueError(f"replication length must be > 0, got {length}")
        self.length = length
        self.clock = 0.0
        self.tracer = tracer
        self._heap: list = []
        self._sequence = 0
        self._finished = False

    def schedule(self, time: float, kind: str, subject: str, action: Callable[[], None]) -> EventRecord:
        if time < self.clock:
            raise SimulationError(
                f"event {kind!r} for {subject!r} scheduled at t={time} "
                f"but the clock is already at t={self.clock}")
        record = EventRecord(time, self._sequence, kind, subject)
        heapq.heappush(self._heap, (time, self._sequence, kind, subject, action))
        self._sequence += 1
        return record

    def schedule_after(self, delay: float, kind: str, subject: str, action: Callable[[], None]) -> EventRecord:
        return self.schedule(self.clock + delay, kind, subject, action)

    def next_event(self) -> Optional[EventRecord]:
        """Dispatch the earliest pending event and advance the clock.

        Returns the dispatched event, or None at end of replication (empty
        list, or next event past the replication length; the clock then
        rests at the replication length).
        """
        if not self._heap:
            self._finish()
            return None
        time, sequence, kind, subject, action = self._heap[0]
        if time > self.length:
            self._finish()
            return None
        heapq.heappop(self._heap)
        self.clock = time
        action()
        return EventRecord(time, sequence, kind, subject)

    def run(self) -> None:
        while self.next_event() is not None:
            pass

    def trace(self, kind: str, subject: str, text: str) -> None:
        if self.tracer is not None:
            self.tracer.emit(self.clock, kind, subject, text)

    @property
    def pending(self) -> int:
        return len(self._heap)

    def _finish(self) -> None:
        if self._finished:
            return
        self._finished = True
        self.clock = self.length
        self.trace(END_REPLICATION, "model", f"replication ends at t={self.length:g}")
