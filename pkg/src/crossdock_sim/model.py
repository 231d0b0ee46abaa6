"""The crossdock order-picking process model and its three variants.

An order arrives, gets a type and a picking point, optionally passes a
conveyor buffer stage, is picked by the first available resource at its
point (automated dispenser first, then skilled, then unskilled operative),
and is disposed at consolidation.  The result of a replication is the
total usage cost: busy plus idle cost over all picking resources, plus any
per-use fees.

Every random attribute of an order is drawn when the order is created, in
a fixed source order.  Under dedicated streams this keeps paired variants
perfectly synchronized: the k-th order in both runs has identical type,
point, and candidate service times, no matter how queues evolve.

The buffer stage models a conveyor segment: totes cannot overtake, so an
order leaves the buffer no earlier than the order ahead of it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Optional

from .engine import ARRIVAL, FAILURE, REPAIR, SHIFT_CHANGE, Simulation, Tracer
from .resources import Resource, ResourceUsage, ShiftSchedule
from .streams import (DEFAULT_ROOT_SEED, Discrete, Exponential, StreamSet, Triangular)

__all__ = [
    "OrderType", "Order", "Variant", "ConfigError",
    "ResourceClassConfig", "FailureConfig", "ModelConfig", "BatchArrivals",
    "Model", "ReplicationResult", "build_model", "run_replication",
    "total_usage_cost", "default_config", "DEFAULT_SHIFTS", "ORDER_MIX_DEFAULT",
]


class ConfigError(ValueError):
    """Raised when a model or experiment configuration is invalid."""


class OrderType(Enum):
    MIFQ = "MIFQ"  # Many Items Few Quantities
    MIMQ = "MIMQ"  # Many Items Many Quantities
    FIFQ = "FIFQ"  # Few Items Few Quantities
    FIMQ = "FIMQ"  # Few Items Many Quantities
    RIRQ = "RIRQ"  # Regular Items Regular Quantities


ORDER_TYPES = tuple(OrderType)

# Default order-type mix, in OrderType declaration order.
ORDER_MIX_DEFAULT = (0.20, 0.25, 0.10, 0.15, 0.30)

# Two 8-hour shifts back to back: on-shift 16 hours per day.
DEFAULT_SHIFTS = ShiftSchedule(windows=((0.0, 480.0), (480.0, 480.0)))


class Variant(Enum):
    BASE = "base"
    BUFFERED = "buffered"
    BUFFERED_CRN = "buffered-crn"

    @property
    def has_buffer(self) -> bool:
        return self is not Variant.BASE

    @property
    def default_stream_policy(self) -> str:
        return "dedicated" if self is Variant.BUFFERED_CRN else "shared"


class Order:
    """An order flowing through the model."""

    __slots__ = ("id", "order_type", "created_at", "disposed_at", "point",
                 "manual_time", "auto_time", "buffer_delay", "point_arrived_at")

    def __init__(self, id: int, order_type: OrderType, created_at: float, point: int,
                 manual_time: float, auto_time: float, buffer_delay: Optional[float]):
        self.id = id
        self.order_type = order_type
        self.created_at = created_at
        self.disposed_at: Optional[float] = None
        self.point = point
        self.manual_time = manual_time
        self.auto_time = auto_time
        self.buffer_delay = buffer_delay
        self.point_arrived_at: Optional[float] = None

    @property
    def label(self) -> str:
        return f"order-{self.id}"

    def __repr__(self) -> str:
        return f"Order({self.id}, {self.order_type.value}, t={self.created_at:.3f})"


@dataclass(frozen=True)
class ResourceClassConfig:
    """Staffing and cost rates for one resource class at each picking point."""

    count_per_point: int
    busy_rate_per_hour: float
    idle_rate_per_hour: float
    cost_per_use: float = 0.0

    def __post_init__(self) -> None:
        if self.count_per_point < 0:
            raise ConfigError(f"count_per_point must be >= 0, got {self.count_per_point}")
        for label, rate in (("busy", self.busy_rate_per_hour), ("idle", self.idle_rate_per_hour),
                            ("per-use", self.cost_per_use)):
            if rate < 0.0:
                raise ConfigError(f"{label} rate must be >= 0, got {rate}")


@dataclass(frozen=True)
class FailureConfig:
    """Breakdown behavior of the automated dispensers.

    Up-time accumulates while the machine is on-shift; repairs likewise
    progress only during on-shift time.
    """

    up: Exponential
    repair: Triangular


@dataclass(frozen=True)
class ModelConfig:
    arrival: Exponential = Exponential(mean=1.0)
    order_mix: Discrete = field(default_factory=lambda: Discrete(ORDER_MIX_DEFAULT))
    manual_pick: Triangular = Triangular(2.0, 3.5, 5.0)
    auto_dispense: Triangular = Triangular(0.5, 1.0, 1.5)
    buffer_delay: Optional[Triangular] = Triangular(0.5, 1.0, 2.0)
    failure: Optional[FailureConfig] = None
    picking_points: int = 4
    skilled: ResourceClassConfig = ResourceClassConfig(2, 12.0, 6.0)
    unskilled: ResourceClassConfig = ResourceClassConfig(2, 8.0, 4.0)
    auto: ResourceClassConfig = ResourceClassConfig(1, 20.0, 10.0)
    unskilled_time_factor: float = 1.25
    replication_length: float = 28800.0
    shifts: ShiftSchedule = DEFAULT_SHIFTS
    stream_policy: Optional[str] = None  # None -> the variant's default

    def __post_init__(self) -> None:
        if len(self.order_mix.weights) != len(ORDER_TYPES):
            raise ConfigError(
                f"order_mix needs {len(ORDER_TYPES)} weights "
                f"(one per order type), got {len(self.order_mix.weights)}")
        if self.picking_points < 1:
            raise ConfigError(f"picking_points must be >= 1, got {self.picking_points}")
        if self.unskilled_time_factor <= 0.0:
            raise ConfigError(
                f"unskilled_time_factor must be > 0, got {self.unskilled_time_factor}")
        if self.replication_length <= 0.0:
            raise ConfigError(
                f"replication_length must be > 0, got {self.replication_length}")
        if self.stream_policy not in (None, "shared", "dedicated"):
            raise ConfigError(
                f"stream_policy must be 'shared' or 'dedicated', got {self.stream_policy!r}")
        per_point = (self.skilled.count_per_point + self.unskilled.count_per_point
                     + self.auto.count_per_point)
        if per_point < 1:
            raise ConfigError("every picking point needs at least one resource unit; "
                              "all class counts are zero")


def default_config(**overrides) -> ModelConfig:
    return replace(ModelConfig(), **overrides) if overrides else ModelConfig()


@dataclass(frozen=True)
class BatchArrivals:
    """Deterministic arrival plan: `count` orders, `spacing` minutes apart.

    Used by the validation protocol in place of the random arrival process;
    order attributes are still drawn from the usual streams.
    """

    count: int
    spacing: float

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"batch count must be >= 1, got {self.count}")
        if self.spacing < 0.0:
            raise ConfigError(f"batch spacing must be >= 0, got {self.spacing}")


@dataclass(frozen=True)
class Model:
    """An executable model: a variant bound to a validated configuration."""

    variant: Variant
    config: ModelConfig

    @property
    def stream_policy(self) -> str:
        return self.config.stream_policy or self.variant.default_stream_policy


def build_model(variant: Variant, config: ModelConfig) -> Model:
    # The config describes one scenario shared by all variants, so it always
    # carries a buffer_delay distribution; only buffered variants use it.
    if variant.has_buffer and config.buffer_delay is None:
        raise ConfigError(f"variant {variant.value!r} needs a buffer_delay distribution")
    if variant is Variant.BUFFERED_CRN and config.stream_policy == "shared":
        raise ConfigError("variant 'buffered-crn' dedicates a stream per source; "
                          "stream_policy 'shared' contradicts it")
    return Model(variant, config)


@dataclass
class ReplicationResult:
    """Output record of one replication."""

    replication_index: int
    total_usage_cost: float
    created: int
    disposed: int
    in_system: int
    resources: List[ResourceUsage]
    wait_count: int = 0
    wait_sum: float = 0.0
    sojourn_sum: float = 0.0

    @property
    def mean_queue_wait(self) -> float:
        return self.wait_sum / self.wait_count if self.wait_count else 0.0

    @property
    def mean_sojourn(self) -> float:
        return self.sojourn_sum / self.disposed if self.disposed else 0.0


def total_usage_cost(usages) -> float:
    """Pure cost recomputation from a usage ledger.

    Sum over resources of busy_rate * busy_hours + idle_rate * idle_hours
    + per_use * use_count.  Rates are per hour; tallies are minutes.
    """
    total = 0.0
    for u in usages:
        total += (u.busy_rate * u.busy_minutes / 60.0
                  + u.idle_rate * u.idle_minutes / 60.0
                  + u.per_use * u.use_count)
    return total


class _Buffer:
    """Order-preserving conveyor segment in front of one picking point."""

    __slots__ = ("sim", "point", "last_exit")

    def __init__(self, sim: Simulation, point: "_Point"):
        self.sim = sim
        self.point = point
        self.last_exit = 0.0

    def accept(self, order: Order) -> None:
        exit_time = max(self.sim.clock + order.buffer_delay, self.last_exit)
        self.last_exit = exit_time
        self.sim.trace("buffer-enter", f"P{self.point.index + 1}.buffer",
                       f"{order.label} delay {order.buffer_delay:.4f} min")
        self.sim.schedule(exit_time, "buffer-exit", f"P{self.point.index + 1}.buffer",
                          lambda: self._exit(order))

    def _exit(self, order: Order) -> None:
        self.sim.trace("buffer-exit", f"P{self.point.index + 1}.buffer", f"{order.label} to point")
        self.point.submit(order)


class _Point:
    """One picking point: its resources in priority order plus a shared queue."""

    __slots__ = ("sim", "index", "entries", "queue", "run")

    def __init__(self, sim: Simulation, index: int, run: "_Replication"):
        self.sim = sim
        self.index = index
        self.run = run
        # (resource, service-time resolver), in seize priority order.
        self.entries: List[tuple] = []
        self.queue: deque = deque()

    def add(self, resource: Resource, service_time: Callable[[Order], float]) -> None:
        self.entries.append((resource, service_time))
        resource.on_freed = lambda _res: self.dispatch()

    def submit(self, order: Order) -> None:
        order.point_arrived_at = self.sim.clock
        if not self._try_start(order):
            self.queue.append(order)
            self.sim.trace("queue-join", f"P{self.index + 1}", f"{order.label} waits")

    def dispatch(self) -> None:
        while self.queue:
            if not self._try_start(self.queue[0]):
                return
            self.queue.popleft()

    def _try_start(self, order: Order) -> bool:
        for resource, service_time in self.entries:
            if resource.available():
                self.run.wait_sum += self.sim.clock - order.point_arrived_at
                self.run.wait_count += 1
                resource.try_start(order, service_time(order), on_done=self.run.dispose)
                return True
        return False


class _Replication:
    """Mutable state of one executing replication."""

    def __init__(self, model: Model, streams: StreamSet, tracer: Optional[Tracer],
                 arrivals: Optional[BatchArrivals]):
        cfg = model.config
        self.model = model
        self.cfg = cfg
        self.streams = streams
        self.sim = Simulation(cfg.replication_length, tracer)
        self.arrival_plan = arrivals

        self.created = 0
        self.disposed = 0
        self.sojourn_sum = 0.0
        self.wait_sum = 0.0
        self.wait_count = 0
        self._next_id = 1

        self.points: List[_Point] = []
        self.buffers: List[_Buffer] = []
        self.resources: List[Resource] = []
        for i in range(cfg.picking_points):
            point = _Point(self.sim, i, self)
            classes = (("auto", cfg.auto, self._auto_time),
                       ("skilled", cfg.skilled, self._skilled_time),
                       ("unskilled", cfg.unskilled, self._unskilled_time))
            for class_name, class_cfg, resolver in classes:
                if class_cfg.count_per_point == 0:
                    continue
                res = Resource(self.sim, f"P{i + 1}.{class_name}", class_cfg.count_per_point,
                               cfg.shifts, class_cfg.busy_rate_per_hour,
                               class_cfg.idle_rate_per_hour, class_cfg.cost_per_use)
                point.add(res, resolver)
                self.resources.append(res)
            self.points.append(point)
            if model.variant.has_buffer:
                self.buffers.append(_Buffer(self.sim, point))

        self._schedule_shift_changes()
        if cfg.failure is not None:
            self._start_failure_processes()
        self._start_arrivals()

    # -- service-time resolvers (attributes are pre-drawn on the order) ----

    @staticmethod
    def _auto_time(order: Order) -> float:
        return order.auto_time

    @staticmethod
    def _skilled_time(order: Order) -> float:
        return order.manual_time

    def _unskilled_time(self, order: Order) -> float:
        return order.manual_time * self.cfg.unskilled_time_factor

    # -- arrivals ----------------------------------------------------------

    def _start_arrivals(self) -> None:
        if self.arrival_plan is not None:
            for k in range(self.arrival_plan.count):
                t = k * self.arrival_plan.spacing
                if t > self.sim.length:
                    break
                self.sim.schedule(t, ARRIVAL, "source", self._create_order)
            return
        self._schedule_next_arrival()

    def _schedule_next_arrival(self) -> None:
        gap = self.cfg.arrival.sample(self.streams.arrivals)
        t = self.sim.clock + gap
        if math.isfinite(t):
            self.sim.schedule(t, ARRIVAL, "source", self._on_arrival)

    def _on_arrival(self) -> None:
        self._create_order()
        self._schedule_next_arrival()

    def _create_order(self) -> None:
        cfg = self.cfg
        # Fixed draw order per order: type, routing, manual, auto, buffer.
        # Under a shared stream this is what makes the buffer draw knock all
        # later draws out of step; under dedicated streams it cannot.
        type_index = cfg.order_mix.sample(self.streams.order_type)
        u_route = self.streams.routing.uniform()
        manual_time = cfg.manual_pick.sample(self.streams.manual_pick)
        auto_time = cfg.auto_dispense.sample(self.streams.auto_dispense)
        buffer_delay = None
        if self.model.variant.has_buffer:
            buffer_delay = cfg.buffer_delay.sample(self.streams.buffer)

        point = min(int(u_route * cfg.picking_points), cfg.picking_points - 1)
        order = Order(self._next_id, ORDER_TYPES[type_index], self.sim.clock, point,
                      manual_time, auto_time, buffer_delay)
        self._next_id += 1
        self.created += 1
        self.sim.trace("create", order.label,
                       f"type={order.order_type.value} point=P{point + 1}")
        if self.buffers:
            self.buffers[point].accept(order)
        else:
            self.points[point].submit(order)

    def dispose(self, order: Order) -> None:
        order.disposed_at = self.sim.clock
        self.disposed += 1
        self.sojourn_sum += order.disposed_at - order.created_at
        self.sim.trace("dispose", order.label,
                       f"sojourn {order.disposed_at - order.created_at:.4f} min")

    # -- schedules and failures -------------------------------------------

    def _schedule_shift_changes(self) -> None:
        seen: List[ShiftSchedule] = []
        for res in self.resources:
            if res.schedule not in seen:
                seen.append(res.schedule)
        for schedule in seen:
            for t in schedule.window_starts(self.sim.length):
                self.sim.schedule(t, SHIFT_CHANGE, "shifts", self._on_shift_start)

    def _on_shift_start(self) -> None:
        self.sim.trace(SHIFT_CHANGE, "shifts", "shift window opens")
        for res in self.resources:
            res.drain()
        for point in self.points:
            point.dispatch()

    def _start_failure_processes(self) -> None:
        for res in self.resources:
            if not res.name.endswith(".auto"):
                continue
            res.on_failure_engaged = self._on_failure_engaged
            self._arm_failure(res)

    def _arm_failure(self, res: Resource) -> None:
        up = self.cfg.failure.up.sample(self.streams.failure)
        t = res.schedule.advance_on(self.sim.clock, up)
        if math.isfinite(t):
            self.sim.schedule(t, FAILURE, res.name, res.fail)

    def _on_failure_engaged(self, res: Resource) -> None:
        duration = self.cfg.failure.repair.sample(self.streams.failure)
        t = res.schedule.advance_on(self.sim.clock, duration)
        self.sim.schedule(t, REPAIR, res.name, lambda: self._repair_done(res))

    def _repair_done(self, res: Resource) -> None:
        res.repair()
        self._arm_failure(res)

    # -- result ------------------------------------------------------------

    def result(self, replication_index: int) -> ReplicationResult:
        length = self.sim.length
        usages = [res.usage(length) for res in self.resources]
        return ReplicationResult(
            replication_index=replication_index,
            total_usage_cost=total_usage_cost(usages),
            created=self.created,
            disposed=self.disposed,
            in_system=self.created - self.disposed,
            resources=usages,
            wait_count=self.wait_count,
            wait_sum=self.wait_sum,
            sojourn_sum=self.sojourn_sum,
        )


def run_replication(model: Model, root_seed: int = DEFAULT_ROOT_SEED,
                    replication_index: int = 0, tracer: Optional[Tracer] = None,
                    arrivals: Optional[BatchArrivals] = None) -> ReplicationResult:
    """Execute one replication; a pure function of (model, seed, index).

    Statistics are collected from t=0 with no warm-up deletion.  Orders
    still in the system when the horizon closes are abandoned; the cost
    they have already accrued stands.
    """
    streams = StreamSet.for_policy(model.stream_policy, root_seed, replication_index)
    run = _Replication(model, streams, tracer, arrivals)
    run.sim.run()
    return run.result(replication_index)
