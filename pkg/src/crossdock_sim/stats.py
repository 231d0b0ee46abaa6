"""Replication statistics: confidence half-widths, the sequential stopping
rule, and the paired-t / variance-ratio comparison tests.

Half-widths here are across-replication intervals: t quantile times sample
standard deviation over sqrt(n).  The sequential rule re-checks the
half-width after every completed replication and stops when the target is
met, or at the replication cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .quantiles import f_ppf, normal_ppf, two_sided_t

__all__ = [
    "SummaryStats", "SequentialConfig", "SequentialState", "ComparisonReport",
    "half_width", "summarize", "sequential_should_continue", "stop_reason",
    "expected_replications", "paired_t_compare", "variance_ratio_compare",
    "TARGET_MET", "CAP_REACHED", "FIXED_COUNT",
]

TARGET_MET = "target-met"
CAP_REACHED = "cap-reached"
FIXED_COUNT = "fixed-count"


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _sample_sd(xs: Sequence[float], mean: float) -> float:
    return math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1))


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: Optional[float]          # absent for n < 2
    min: float
    max: float
    confidence: float
    half_width: Optional[float]  # absent for n < 2


def half_width(sample: Sequence[float], confidence: float = 0.95) -> Optional[float]:
    """t-based confidence half-width of the sample mean; None for n < 2."""
    n = len(sample)
    if n < 2:
        return None
    mean = _mean(sample)
    sd = _sample_sd(sample, mean)
    return two_sided_t(confidence, n - 1) * sd / math.sqrt(n)


def summarize(sample: Sequence[float], confidence: float = 0.95) -> SummaryStats:
    if not sample:
        raise ValueError("cannot summarize an empty sample")
    n = len(sample)
    mean = _mean(sample)
    if n < 2:
        return SummaryStats(n, mean, None, min(sample), max(sample), confidence, None)
    sd = _sample_sd(sample, mean)
    hw = two_sided_t(confidence, n - 1) * sd / math.sqrt(n)
    return SummaryStats(n, mean, sd, min(sample), max(sample), confidence, hw)


@dataclass(frozen=True)
class SequentialConfig:
    """Stopping-rule parameters: target half-width, cap, confidence."""

    target_half_width: float
    confidence: float = 0.95
    replication_cap: int = 999_999
    min_replications: int = 3

    def __post_init__(self) -> None:
        if not self.target_half_width > 0.0:
            raise ValueError(f"target_half_width must be > 0, got {self.target_half_width}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.min_replications < 2:
            raise ValueError(f"min_replications must be >= 2, got {self.min_replications}")
        if self.replication_cap < self.min_replications:
            raise ValueError(
                f"replication_cap {self.replication_cap} is below "
                f"min_replications {self.min_replications}")


@dataclass
class SequentialState:
    """Completed-replication counter plus the running output sample."""

    sample: List[float] = field(default_factory=list)

    @property
    def completed(self) -> int:
        return len(self.sample)

    def record(self, value: float) -> None:
        self.sample.append(value)

    def half_width(self, confidence: float) -> Optional[float]:
        return half_width(self.sample, confidence)


def sequential_should_continue(state: SequentialState, config: SequentialConfig) -> bool:
    """True if another replication should run.

    Continue while below the minimum replication count, or while the
    half-width still exceeds the target and the cap is not yet reached.
    """
    if state.completed < config.min_replications:
        return True
    if state.completed >= config.replication_cap:
        return False
    hw = state.half_width(config.confidence)
    return hw is None or hw > config.target_half_width


def stop_reason(state: SequentialState, config: SequentialConfig) -> str:
    """Why a stopped sequential run stopped."""
    hw = state.half_width(config.confidence)
    if hw is not None and hw <= config.target_half_width:
        return TARGET_MET
    return CAP_REACHED


def expected_replications(sd_estimate: float, target: float, confidence: float = 0.95) -> int:
    """Planning estimate: ceil((z * sd / target)^2), at least 1."""
    if sd_estimate < 0.0:
        raise ValueError(f"sd_estimate must be >= 0, got {sd_estimate}")
    if not target > 0.0:
        raise ValueError(f"target must be > 0, got {target}")
    if sd_estimate == 0.0:
        return 1
    z = normal_ppf(1.0 - (1.0 - confidence) / 2.0)
    return max(1, math.ceil((z * sd_estimate / target) ** 2))


@dataclass(frozen=True)
class ComparisonReport:
    """Result of a paired-t or variance-ratio comparison of two series."""

    identifier: str
    kind: str                    # "means" or "variances"
    alpha: float
    estimate: float              # mean difference, or variance ratio
    ci_low: float
    ci_high: float
    sd: Optional[float]          # sd of paired differences (means only)
    half_width: Optional[float]  # half-width of the difference CI (means only)
    n_a: int
    n_b: int
    min_a: float
    max_a: float
    min_b: float
    max_b: float
    reject: bool

    @property
    def verdict(self) -> str:
        return "reject" if self.reject else "fail-to-reject"


def paired_t_compare(a: Sequence[float], b: Sequence[float], alpha: float = 0.05,
                     identifier: str = "value") -> ComparisonReport:
    """Paired-t comparison of means on per-index differences.

    Pairing by replication index stays valid when the series are correlated
    (common random numbers); a two-sample test would not be.
    """
    if len(a) != len(b):
        raise ValueError(
            f"paired series must have equal length, got {len(a)} and {len(b)} "
            "(mispaired experiment files?)")
    n = len(a)
    if n < 2:
        raise ValueError(f"paired comparison needs n >= 2, got {n}")
    diffs = [x - y for x, y in zip(a, b)]
    estimate = _mean(diffs)
    sd = _sample_sd(diffs, estimate)
    hw = two_sided_t(1.0 - alpha, n - 1) * sd / math.sqrt(n)
    ci_low, ci_high = estimate - hw, estimate + hw
    return ComparisonReport(
        identifier=identifier, kind="means", alpha=alpha,
        estimate=estimate, ci_low=ci_low, ci_high=ci_high, sd=sd, half_width=hw,
        n_a=n, n_b=n, min_a=min(a), max_a=max(a), min_b=min(b), max_b=max(b),
        reject=not (ci_low <= 0.0 <= ci_high),
    )


def variance_ratio_compare(a: Sequence[float], b: Sequence[float], alpha: float = 0.05,
                           identifier: str = "value") -> ComparisonReport:
    """F-based comparison of variances via the ratio var(a) / var(b)."""
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise ValueError(f"variance comparison needs n >= 2 on both sides, got {n_a} and {n_b}")
    mean_a, mean_b = _mean(a), _mean(b)
    var_a = math.fsum((x - mean_a) ** 2 for x in a) / (n_a - 1)
    var_b = math.fsum((x - mean_b) ** 2 for x in b) / (n_b - 1)
    if var_b == 0.0:
        raise ValueError("variance of the second series is zero; ratio is undefined")
    ratio = var_a / var_b
    ci_low = ratio / f_ppf(1.0 - alpha / 2.0, n_a - 1, n_b - 1)
    ci_high = ratio * f_ppf(1.0 - alpha / 2.0, n_b - 1, n_a - 1)
    return ComparisonReport(
        identifier=identifier, kind="variances", alpha=alpha,
        estimate=ratio, ci_low=ci_low, ci_high=ci_high, sd=None, half_width=None,
        n_a=n_a, n_b=n_b, min_a=min(a), max_a=max(a), min_b=min(b), max_b=max(b),
        reject=not (ci_low <= 1.0 <= ci_high),
    )
