"""Seedable random-number streams with one stream per source of model randomness.

Every source of randomness in the model (arrivals, order-type mix, manual
picking, automated dispensing, buffer delay, machine failure) gets its own
substream, derived purely from (root seed, source name, replication index)
via numpy's SeedSequence spawn keys.  Consuming one stream never moves
another, and the substream for a given identity does not depend on how many
other streams exist or have been used.  That is what keeps paired model
variants synchronized when they share a root seed.

All samplers are inverse-CDF transforms of exactly one uniform draw per
sample.  No rejection sampling: a sampler that sometimes consumed two
uniforms would knock paired variants out of step as soon as a parameter
differed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "SOURCES",
    "StreamId",
    "Stream",
    "StreamSet",
    "substream",
    "Exponential",
    "Triangular",
    "Discrete",
    "Distribution",
    "DistributionError",
]

# Model randomness sources, in fixed order. The order indexes spawn keys, so
# it must never be reordered without bumping the archive version.
SOURCES = ("arrivals", "order-type-mix", "manual-pick", "auto-dispense", "buffer", "failure")

_SOURCE_INDEX = {name: i for i, name in enumerate(SOURCES)}

# Spawn-key slot for the single stream used when a model runs with the
# naive "everything shares one stream" policy.
_SHARED_SLOT = len(SOURCES)

DEFAULT_ROOT_SEED = 12345

_BUFFER_SIZE = 4096


class DistributionError(ValueError):
    """Raised when distribution parameters fail validation."""


@dataclass(frozen=True)
class StreamId:
    """Identity of one substream: which randomness source, which replication."""

    name: str
    replication_index: int

    def __post_init__(self) -> None:
        if self.name not in _SOURCE_INDEX:
            raise ValueError(f"unknown stream name {self.name!r}; expected one of {SOURCES}")
        if self.replication_index < 0:
            raise ValueError(f"replication_index must be >= 0, got {self.replication_index}")


class Stream:
    """A single-owner uniform stream with inverse-CDF samplers.

    Draws are buffered in chunks for speed; PCG64 produces the identical
    sequence whether doubles are drawn one at a time or in blocks, so
    buffering does not change any sampled value.
    """

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, generator: np.random.Generator):
        self._gen = generator
        self._buf = np.empty(0)
        self._pos = 0

    def uniform(self) -> float:
        """Next uniform draw in [0, 1)."""
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(_BUFFER_SIZE)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def exponential(self, mean: float) -> float:
        """Exponential variate via -mean * ln(1 - u); one uniform consumed."""
        return -mean * math.log1p(-self.uniform())

    def triangular(self, low: float, mode: float, high: float) -> float:
        """Triangular variate by inverse CDF; one uniform consumed."""
        u = self.uniform()
        span = high - low
        cut = (mode - low) / span
        if u < cut:
            return low + math.sqrt(u * span * (mode - low))
        return high - math.sqrt((1.0 - u) * span * (high - mode))

    def discrete(self, cum_weights: Sequence[float]) -> int:
        """Index i with probability weights[i]; one uniform consumed."""
        u = self.uniform()
        for i, c in enumerate(cum_weights):
            if u < c:
                return i
        return len(cum_weights) - 1


def substream(root_seed: int, stream_id: StreamId, lane: int = 0) -> Stream:
    """Stream for the given identity, a pure function of the root seed.

    ``lane`` selects a companion stream sharing the same identity; lane 0 is
    the stream proper, higher lanes are derived companions (the order-type
    stream's companion carries the picking-point routing draws).
    """
    key = (_SOURCE_INDEX[stream_id.name], stream_id.replication_index, lane)
    seq = np.random.SeedSequence(root_seed, spawn_key=key)
    return Stream(np.random.Generator(np.random.PCG64(seq)))


def _shared_stream(root_seed: int, replication_index: int) -> Stream:
    seq = np.random.SeedSequence(root_seed, spawn_key=(_SHARED_SLOT, replication_index, 0))
    return Stream(np.random.Generator(np.random.PCG64(seq)))


class StreamSet:
    """The bundle of streams one replication draws from.

    ``dedicated`` gives each source its own independent substream (the
    common-random-numbers discipline).  ``shared`` mimics naive seeding:
    every source pulls from one and the same stream, so an extra draw for
    one source shifts every later draw of every other source.
    """

    __slots__ = ("arrivals", "order_type", "routing", "manual_pick",
                 "auto_dispense", "buffer", "failure", "policy")

    def __init__(self, policy: str, arrivals: Stream, order_type: Stream, routing: Stream,
                 manual_pick: Stream, auto_dispense: Stream, buffer: Stream, failure: Stream):
        self.policy = policy
        self.arrivals = arrivals
        self.order_type = order_type
        self.routing = routing
        self.manual_pick = manual_pick
        self.auto_dispense = auto_dispense
        self.buffer = buffer
        self.failure = failure

    @classmethod
    def dedicated(cls, root_seed: int, replication_index: int) -> "StreamSet":
        def s(name: str, lane: int = 0) -> Stream:
            return substream(root_seed, StreamId(name, replication_index), lane)

        return cls(
            "dedicated",
            arrivals=s("arrivals"),
            order_type=s("order-type-mix"),
            routing=s("order-type-mix", lane=1),
            manual_pick=s("manual-pick"),
            auto_dispense=s("auto-dispense"),
            buffer=s("buffer"),
            failure=s("failure"),
        )

    @classmethod
    def shared(cls, root_seed: int, replication_index: int) -> "StreamSet":
        one = _shared_stream(root_seed, replication_index)
        return cls("shared", one, one, one, one, one, one, one)

    @classmethod
    def for_policy(cls, policy: str, root_seed: int, replication_index: int) -> "StreamSet":
        if policy == "dedicated":
            return cls.dedicated(root_seed, replication_index)
        if policy == "shared":
            return cls.shared(root_seed, replication_index)
        raise ValueError(f"unknown stream policy {policy!r}; expected 'dedicated' or 'shared'")


@dataclass(frozen=True)
class Exponential:
    """Exponential distribution, parameterized by its mean (minutes).

    math.inf is a legal mean and acts as an "arrivals disabled" sentinel:
    every sampled gap is infinite.
    """

    mean: float

    def __post_init__(self) -> None:
        if not self.mean > 0.0:
            raise DistributionError(f"exponential mean must be > 0, got {self.mean}")

    def sample(self, stream: Stream) -> float:
        return stream.exponential(self.mean)

    def theoretical_mean(self) -> float:
        return self.mean

    def as_dict(self) -> dict:
        return {"kind": "exponential", "mean": self.mean}


@dataclass(frozen=True)
class Triangular:
    """Triangular distribution with min <= mode <= max and min < max."""

    low: float
    mode: float
    high: float

    def __post_init__(self) -> None:
        if not (self.low <= self.mode <= self.high):
            raise DistributionError(
                f"triangular needs min <= mode <= max, got ({self.low}, {self.mode}, {self.high})")
        if not self.low < self.high:
            raise DistributionError(
                f"triangular needs min < max, got min = max = {self.low}")

    def sample(self, stream: Stream) -> float:
        return stream.triangular(self.low, self.mode, self.high)

    def theoretical_mean(self) -> float:
        return (self.low + self.mode + self.high) / 3.0

    def scaled(self, factor: float) -> "Triangular":
        return Triangular(self.low * factor, self.mode * factor, self.high * factor)

    def as_dict(self) -> dict:
        return {"kind": "triangular", "min": self.low, "mode": self.mode, "max": self.high}


class Discrete:
    """Discrete distribution over indices 0..k-1 with the given weights."""

    __slots__ = ("weights", "_cum")

    def __init__(self, weights: Sequence[float]):
        weights = tuple(float(w) for w in weights)
        if any(w < 0.0 for w in weights):
            raise DistributionError(f"discrete weights must be nonnegative, got {weights}")
        total = sum(weights)
        if abs(total - 1.0) > 1e-9:
            raise DistributionError(f"discrete weights must sum to 1 (got {total!r})")
        self.weights = weights
        cum = []
        acc = 0.0
        for w in weights:
            acc += w
            cum.append(acc)
        cum[-1] = 1.0
        self._cum = tuple(cum)

    def sample(self, stream: Stream) -> int:
        return stream.discrete(self._cum)

    def as_dict(self) -> dict:
        return {"kind": "discrete", "weights": list(self.weights)}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Discrete) and self.weights == other.weights

    def __repr__(self) -> str:
        return f"Discrete({list(self.weights)})"


Distribution = Union[Exponential, Triangular, Discrete]
