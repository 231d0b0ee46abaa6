"""Experiment execution: fixed-replication and sequential modes.

Replications are pure functions of (variant, config, root seed, replication
index), so they can run in a worker pool.  Results are committed to the
running sample strictly in replication-index order, and the sequential
stopping rule is evaluated only on committed results; the outcome is
therefore identical for any worker count.  Speculative replications that
were in flight when the rule said stop are discarded.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Union

from .archive import RunArchive
from .model import Model, ModelConfig, ReplicationResult, Variant, build_model, run_replication
from .stats import (FIXED_COUNT, SequentialConfig, SequentialState,
                    sequential_should_continue, stop_reason)
from .streams import DEFAULT_ROOT_SEED

__all__ = ["FixedMode", "SequentialMode", "ExperimentSpec", "ExperimentOutcome",
           "run_experiment"]


@dataclass(frozen=True)
class FixedMode:
    """Run exactly n replications."""

    n: int
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"fixed replication count must be >= 1, got {self.n}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")

    def describe(self) -> Dict:
        return {"mode": "fixed", "n": self.n, "confidence": self.confidence}


@dataclass(frozen=True)
class SequentialMode:
    """Run until the target half-width is met (or the cap is reached)."""

    rule: SequentialConfig

    def describe(self) -> Dict:
        r = self.rule
        return {"mode": "sequential", "target_half_width": r.target_half_width,
                "confidence": r.confidence, "replication_cap": r.replication_cap,
                "min_replications": r.min_replications}


Mode = Union[FixedMode, SequentialMode]


@dataclass(frozen=True)
class ExperimentSpec:
    variant: Variant
    config: ModelConfig
    mode: Mode
    root_seed: int = DEFAULT_ROOT_SEED
    output_path: Optional[str] = None


@dataclass
class ExperimentOutcome:
    archive: RunArchive
    wall_seconds: float


def _run_one(variant: Variant, config: ModelConfig, root_seed: int,
             index: int) -> ReplicationResult:
    # Module-level so worker processes can unpickle the call.
    model = build_model(variant, config)
    return run_replication(model, root_seed=root_seed, replication_index=index)


ProgressFn = Callable[[int, Optional[float]], None]


class _Dispatcher:
    """Yields replication results in index order, inline or via a pool.

    `limit` bounds speculative submission: n in fixed mode, the replication
    cap in sequential mode.
    """

    def __init__(self, spec: ExperimentSpec, workers: int,
                 pool: Optional[ProcessPoolExecutor], limit: int):
        self.spec = spec
        self.workers = workers
        self.pool = pool
        self.limit = limit
        self.model = build_model(spec.variant, spec.config)
        self.next_submit = 0
        self.pending: Dict[int, object] = {}

    def _submit(self) -> None:
        index = self.next_submit
        self.next_submit += 1
        self.pending[index] = self.pool.submit(
            _run_one, self.spec.variant, self.spec.config, self.spec.root_seed, index)

    def result(self, index: int) -> ReplicationResult:
        if self.pool is None:
            return run_replication(self.model, root_seed=self.spec.root_seed,
                                   replication_index=index)
        # Keep the pool saturated with speculative work, then block on the
        # one index the commit order needs next.
        while (self.next_submit <= index
               or (len(self.pending) < self.workers and self.next_submit < self.limit)):
            self._submit()
        return self.pending.pop(index).result()

    def discard_pending(self) -> None:
        for future in self.pending.values():
            future.cancel()
        self.pending.clear()


def run_experiment(spec: ExperimentSpec, workers: int = 1,
                   progress: Optional[ProgressFn] = None) -> ExperimentOutcome:
    """Execute the spec; persist the archive if an output path is set."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    start = time.perf_counter()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        limit = spec.mode.n if isinstance(spec.mode, FixedMode) else spec.mode.rule.replication_cap
        dispatcher = _Dispatcher(spec, workers, pool, limit)
        results: List[ReplicationResult] = []
        if isinstance(spec.mode, FixedMode):
            confidence = spec.mode.confidence
            reason = FIXED_COUNT
            for i in range(spec.mode.n):
                results.append(dispatcher.result(i))
                if progress is not None:
                    progress(len(results), None)
        else:
            rule = spec.mode.rule
            confidence = rule.confidence
            state = SequentialState()
            while sequential_should_continue(state, rule):
                index = state.completed
                result = dispatcher.result(index)
                results.append(result)
                state.record(result.total_usage_cost)
                if progress is not None:
                    progress(state.completed, state.half_width(confidence))
            reason = stop_reason(state, rule)
            dispatcher.discard_pending()
    finally:
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
    archive = RunArchive.from_results(
        dispatcher.model, spec.root_seed, spec.mode.describe(), results,
        confidence=confidence, stop_reason=reason)
    if spec.output_path is not None:
        archive.save(spec.output_path)
    return ExperimentOutcome(archive=archive, wall_seconds=time.perf_counter() - start)
