"""Model validation protocol: four checks on a reduced scenario.

The reduced scenario narrows the order mix to three types and shortens the
replication to ten days, then:

  a. every configured order type (and no other) shows up in the trace;
  b. every traced order follows the forward processing sequence
     create -> (buffer) -> (queue) -> service -> dispose at one point;
  c. a scheduled batch of k orders yields exactly k created and k disposed;
  d. inflating the service times increases mean queue wait under the same
     seeds (the model reacts to forced variation in the right direction).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from .engine import Tracer
from .model import (BatchArrivals, Model, ModelConfig, ORDER_TYPES, Variant,
                    build_model, default_config, run_replication)
from .streams import DEFAULT_ROOT_SEED, Discrete

__all__ = ["CheckResult", "ValidationReport", "reduced_config", "run_validation"]

# Three-type mix for the reduced scenario.  The weights are binary-exact so
# the cumulative scan can never reach the zero-weight types.
REDUCED_MIX = (0.25, 0.50, 0.25, 0.0, 0.0)
REDUCED_DAYS = 10
BATCH_COUNT = 100
BATCH_SPACING = 2.0
INFLATION = 2.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    excerpt: List[str]

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status}  {self.name}: {self.detail}"]
        lines += [f"      {line}" for line in self.excerpt]
        return "\n".join(lines)


@dataclass
class ValidationReport:
    variant: Variant
    root_seed: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        head = (f"validation: variant={self.variant.value} seed={self.root_seed} "
                f"({REDUCED_DAYS}-day reduced scenario, 3 order types)")
        body = "\n".join(c.render() for c in self.checks)
        tail = "all checks passed" if self.passed else "VALIDATION FAILED"
        return "\n".join([head, body, tail])


def reduced_config(base: Optional[ModelConfig] = None) -> ModelConfig:
    base = base or default_config()
    return replace(base, order_mix=Discrete(REDUCED_MIX),
                   replication_length=REDUCED_DAYS * base.shifts.day_length)


def _order_events(tracer: Tracer) -> "Dict[str, List]":
    """Group trace events by order label, in dispatch order."""
    per_order: Dict[str, List] = {}
    for ev in tracer.events:
        if ev.kind in ("create", "dispose"):
            label = ev.subject
        elif ev.kind in ("buffer-enter", "buffer-exit", "queue-join",
                         "start-service", "end-service"):
            label = ev.text.split()[0]
            if not label.startswith("order-"):
                continue
        else:
            continue
        per_order.setdefault(label, []).append(ev)
    return per_order


def _excerpt(events: List, limit: int = 8) -> List[str]:
    return [ev.line() for ev in events[:limit]]


_POINT_RE = re.compile(r"point=(P\d+)$")


def _sequence_error(events: List, buffered: bool) -> Optional[str]:
    """None if the order's events follow the forward sequence, else why not."""
    kinds = [ev.kind for ev in events]
    if kinds[0] != "create":
        return f"first event is {kinds[0]!r}, not create"
    match = _POINT_RE.search(events[0].text)
    if match is None:
        return "create line does not name a picking point"
    point = match.group(1)
    for ev in events[1:]:
        if ev.kind == "dispose":
            continue
        subject = ev.subject
        if not (subject == point or subject.startswith(point + ".")):
            return f"event at {subject!r} but the order was routed to {point}"
    # Required steps in order; optional steps may be skipped.  A trailing
    # prefix is legal: the order may still be in flight at the horizon.
    expected: List[Tuple[str, bool]] = [("create", True)]
    if buffered:
        expected += [("buffer-enter", True), ("buffer-exit", True)]
    expected += [("queue-join", False), ("start-service", True),
                 ("end-service", True), ("dispose", True)]
    i = 0
    for kind in kinds:
        while i < len(expected) and expected[i][0] != kind:
            if expected[i][1]:
                return f"{kind!r} arrived before required {expected[i][0]!r}"
            i += 1
        if i == len(expected):
            return f"unexpected {kind!r} after the sequence completed"
        i += 1
    times = [ev.time for ev in events]
    if any(b < a for a, b in zip(times, times[1:])):
        return "event times go backwards"
    return None


def _check_types(model: Model, per_order: Dict[str, List]) -> CheckResult:
    configured = {t.value for t, w in zip(ORDER_TYPES, model.config.order_mix.weights)
                  if w > 0.0}
    seen: Dict[str, int] = {}
    offender = None
    for label, events in per_order.items():
        text = events[0].text
        type_name = text.split()[0].split("=", 1)[1]
        seen[type_name] = seen.get(type_name, 0) + 1
        if type_name not in configured and offender is None:
            offender = events
    missing = configured - set(seen)
    extra = set(seen) - configured
    counts = ", ".join(f"{k}={seen[k]}" for k in sorted(seen))
    if missing or extra:
        detail = f"configured {sorted(configured)}, observed {counts or 'none'}"
        if missing:
            detail += f"; missing {sorted(missing)}"
        if extra:
            detail += f"; unexpected {sorted(extra)}"
        return CheckResult("order-types-present", False, detail,
                           _excerpt(offender or next(iter(per_order.values()))))
    return CheckResult("order-types-present", True,
                       f"all {len(configured)} configured types observed ({counts})", [])


def _check_sequence(model: Model, per_order: Dict[str, List]) -> CheckResult:
    buffered = model.variant.has_buffer
    for label in sorted(per_order, key=lambda l: int(l.split("-")[1])):
        events = per_order[label]
        error = _sequence_error(events, buffered)
        if error is not None:
            return CheckResult("forward-sequence", False, f"{label}: {error}",
                               _excerpt(events))
    return CheckResult("forward-sequence", True,
                       f"{len(per_order)} orders all follow the forward sequence", [])


def _check_batch(model: Model, root_seed: int) -> CheckResult:
    plan = BatchArrivals(count=BATCH_COUNT, spacing=BATCH_SPACING)
    tracer = Tracer()
    result = run_replication(model, root_seed=root_seed, replication_index=1,
                             tracer=tracer, arrivals=plan)
    ok = result.created == plan.count and result.disposed == plan.count
    detail = (f"scheduled k={plan.count}, created={result.created}, "
              f"disposed={result.disposed}")
    excerpt = [] if ok else [ev.line() for ev in tracer.events[-8:]]
    return CheckResult("batch-conservation", ok, detail, excerpt)


def _check_variation(config: ModelConfig, variant: Variant, root_seed: int) -> CheckResult:
    # Dedicated streams pin arrivals and routing across the pair, so the
    # only difference is the service-time inflation.
    paired = replace(config, stream_policy="dedicated")
    inflated = replace(paired,
                       manual_pick=paired.manual_pick.scaled(INFLATION),
                       auto_dispense=paired.auto_dispense.scaled(INFLATION))
    base_run = run_replication(build_model(variant, paired), root_seed=root_seed,
                               replication_index=2)
    slow_run = run_replication(build_model(variant, inflated), root_seed=root_seed,
                               replication_index=2)
    ok = slow_run.mean_queue_wait > base_run.mean_queue_wait
    detail = (f"mean queue wait {base_run.mean_queue_wait:.4f} -> "
              f"{slow_run.mean_queue_wait:.4f} min with service times x{INFLATION:g}")
    if not ok:
        detail += " (expected a strict increase)"
    return CheckResult("forced-variation", ok, detail, [])


def run_validation(base: Optional[ModelConfig] = None,
                   variant: Variant = Variant.BASE,
                   root_seed: int = DEFAULT_ROOT_SEED) -> ValidationReport:
    config = reduced_config(base)
    model = build_model(variant, config)
    tracer = Tracer()
    run_replication(model, root_seed=root_seed, replication_index=0, tracer=tracer)
    per_order = _order_events(tracer)
    checks = [
        _check_types(model, per_order),
        _check_sequence(model, per_order),
        _check_batch(model, root_seed),
        _check_variation(config, variant, root_seed),
    ]
    return ValidationReport(variant=variant, root_seed=root_seed, checks=checks)
