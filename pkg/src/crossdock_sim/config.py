"""Experiment configuration files (TOML).

Every model constant is a named key with its unit in the name (minutes,
per-hour rates), defaulting to the standard scenario; a config file only
has to state what it changes.  Unknown keys are rejected so typos fail
loudly instead of silently running the default.  Diagnostics carry the key
path and, where the key appears in the file, its line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional

try:
    import tomllib as _toml  # 3.11+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as _toml

from .model import (ConfigError, FailureConfig, ModelConfig, ResourceClassConfig,
                    Variant, default_config)
from .experiment import FixedMode, Mode, SequentialMode
from .resources import ShiftSchedule
from .stats import SequentialConfig
from .streams import DEFAULT_ROOT_SEED, Discrete, DistributionError, Exponential, Triangular

__all__ = ["ConfigFileError", "ParsedConfig", "load_config", "parse_config", "default_toml"]

_MISSING = object()


class ConfigFileError(ValueError):
    """A configuration file problem, with enough context to fix it."""


@dataclass(frozen=True)
class ParsedConfig:
    variant: Variant
    model: ModelConfig
    mode: Mode
    root_seed: int
    output_path: Optional[str] = None


def _line_of(src: str, key: str) -> Optional[int]:
    for number, line in enumerate(src.splitlines(), 1):
        code = line.split("#", 1)[0]
        if re.match(rf"\s*{re.escape(key)}\s*=", code) or re.search(
                rf"\[[\w.\-]*\b{re.escape(key)}\b[\w.\-]*\]", code):
            return number
    return None


class _Table:
    """One TOML table with typed, unknown-key-checked access."""

    def __init__(self, data: Dict, path: str, src: str):
        self.data = dict(data)
        self.path = path
        self.src = src

    def _fail(self, key: str, message: str) -> "NoReturn":
        where = f"{self.path}.{key}" if self.path else key
        line = _line_of(self.src, key)
        suffix = f" (line {line})" if line is not None else ""
        raise ConfigFileError(f"{where}: {message}{suffix}")

    def take(self, key: str, kind: type, default=_MISSING):
        if key not in self.data:
            if default is _MISSING:
                self._fail(key, "missing required key")
            return default
        value = self.data.pop(key)
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
            self._fail(key, f"expected {kind.__name__}, got {type(value).__name__}")
        return value

    def triple(self, key: str, default=_MISSING) -> "Optional[tuple]":
        value = self.take(key, list, default)
        if value is default and default is not _MISSING:
            return default
        if len(value) != 3 or not all(isinstance(v, (int, float)) for v in value):
            self._fail(key, "expected [min, mode, max] of three numbers")
        return tuple(float(v) for v in value)

    def sub(self, key: str) -> "Optional[_Table]":
        if key not in self.data:
            return None
        value = self.data.pop(key)
        if not isinstance(value, dict):
            self._fail(key, f"expected a table, got {type(value).__name__}")
        path = f"{self.path}.{key}" if self.path else key
        return _Table(value, path, self.src)

    def finish(self) -> None:
        if self.data:
            self._fail(next(iter(self.data)), "unknown key")


def _guard(path: str, src: str, key: str):
    """Re-raise model/distribution validation errors as config diagnostics."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, (ConfigError, DistributionError, ValueError)):
                table = _Table({}, path, src)
                table._fail(key, str(exc))
            return False
    return _Ctx()


def _attribute(path: str, src: str, exc: Exception, mapping: Dict[str, str]):
    """Pin a validation error on the config key its message names."""
    first = str(exc).split()[0] if str(exc) else ""
    key = mapping.get(first)
    if key is not None:
        _Table({}, path, src)._fail(key, str(exc))
    line = _line_of(src, path.split(".")[-1]) if path else None
    suffix = f" (line {line})" if line is not None else ""
    raise ConfigFileError(f"{path or 'config'}: {exc}{suffix}") from None


_RESOURCE_KEYS = {
    "count_per_point": "count_per_point",
    "busy": "busy_rate_per_hour",
    "idle": "idle_rate_per_hour",
    "per-use": "cost_per_use",
}

_MODEL_KEYS = {
    "order_mix": "order_mix",
    "picking_points": "picking_points",
    "replication_length": "replication_length_minutes",
    "unskilled_time_factor": "unskilled_time_factor",
    "stream_policy": "stream_policy",
}


def _resource_class(table: Optional[_Table], defaults: ResourceClassConfig,
                    path: str, src: str) -> ResourceClassConfig:
    if table is None:
        return defaults
    count = table.take("count_per_point", int, defaults.count_per_point)
    busy = table.take("busy_rate_per_hour", float, defaults.busy_rate_per_hour)
    idle = table.take("idle_rate_per_hour", float, defaults.idle_rate_per_hour)
    per_use = table.take("cost_per_use", float, defaults.cost_per_use)
    table.finish()
    try:
        return ResourceClassConfig(count, busy, idle, per_use)
    except ConfigError as exc:
        _attribute(path, src, exc, _RESOURCE_KEYS)


def _parse_model(table: Optional[_Table], src: str) -> ModelConfig:
    defaults = default_config()
    if table is None:
        return defaults
    kwargs = {}
    mean = table.take("arrival_mean_minutes", float, None)
    if mean is not None:
        with _guard("model", src, "arrival_mean_minutes"):
            kwargs["arrival"] = Exponential(mean)
    mix = table.take("order_mix", list, None)
    if mix is not None:
        with _guard("model", src, "order_mix"):
            kwargs["order_mix"] = Discrete(mix)
    for key, field in (("manual_pick_minutes", "manual_pick"),
                       ("auto_dispense_minutes", "auto_dispense"),
                       ("buffer_delay_minutes", "buffer_delay")):
        triple = table.triple(key, None)
        if triple is not None:
            with _guard("model", src, key):
                kwargs[field] = Triangular(*triple)
    points = table.take("picking_points", int, None)
    if points is not None:
        kwargs["picking_points"] = points
    for key, field in (("replication_length_minutes", "replication_length"),
                       ("unskilled_time_factor", "unskilled_time_factor")):
        value = table.take(key, float, None)
        if value is not None:
            kwargs[field] = value
    policy = table.take("stream_policy", str, None)
    if policy is not None:
        kwargs["stream_policy"] = policy

    shifts = table.sub("shifts")
    if shifts is not None:
        windows = shifts.take("windows", list)
        day_length = shifts.take("day_length_minutes", float, 1440.0)
        shifts.finish()
        with _guard("model.shifts", src, "windows"):
            kwargs["shifts"] = ShiftSchedule(
                windows=tuple((float(s), float(d)) for s, d in windows),
                day_length=day_length)

    for class_name in ("skilled", "unskilled", "auto"):
        sub = table.sub(class_name)
        parsed = _resource_class(sub, getattr(defaults, class_name),
                                 f"model.{class_name}", src)
        if sub is not None:
            kwargs[class_name] = parsed

    failure = table.sub("failure")
    if failure is not None:
        up_mean = failure.take("up_mean_on_shift_minutes", float)
        repair = failure.triple("repair_minutes")
        failure.finish()
        with _guard("model.failure", src, "up_mean_on_shift_minutes"):
            up = Exponential(up_mean)
        with _guard("model.failure", src, "repair_minutes"):
            kwargs["failure"] = FailureConfig(up=up, repair=Triangular(*repair))

    table.finish()
    try:
        return default_config(**kwargs)
    except (ConfigError, DistributionError) as exc:
        _attribute("model", src, exc, _MODEL_KEYS)


def _parse_experiment(table: Optional[_Table], src: str):
    variant_name = "base"
    mode_name = "fixed"
    replications = 500
    confidence = 0.95
    root_seed = DEFAULT_ROOT_SEED
    output_path = None
    target, cap, minimum = 0.5, 999_999, 3
    if table is not None:
        variant_name = table.take("variant", str, variant_name)
        mode_name = table.take("mode", str, mode_name)
        replications = table.take("replications", int, replications)
        confidence = table.take("confidence", float, confidence)
        root_seed = table.take("root_seed", int, root_seed)
        output_path = table.take("output", str, output_path)
        seq = table.sub("sequential")
        if seq is not None:
            target = seq.take("target_half_width", float, target)
            cap = seq.take("replication_cap", int, cap)
            minimum = seq.take("min_replications", int, minimum)
            seq.finish()
        table.finish()

    try:
        variant = Variant(variant_name)
    except ValueError:
        _Table({}, "experiment", src)._fail(
            "variant", f"unknown variant {variant_name!r}; expected one of "
            f"{[v.value for v in Variant]}")
    if mode_name == "fixed":
        try:
            mode: Mode = FixedMode(replications, confidence)
        except ValueError as exc:
            _attribute("experiment", src, exc,
                       {"fixed": "replications", "confidence": "confidence"})
    elif mode_name == "sequential":
        try:
            mode = SequentialMode(SequentialConfig(
                target_half_width=target, confidence=confidence,
                replication_cap=cap, min_replications=minimum))
        except ValueError as exc:
            _attribute("experiment.sequential", src, exc, {
                "target_half_width": "target_half_width",
                "replication_cap": "replication_cap",
                "min_replications": "min_replications",
                "confidence": "confidence",
            })
    else:
        _Table({}, "experiment", src)._fail(
            "mode", f"unknown mode {mode_name!r}; expected 'fixed' or 'sequential'")
    return variant, mode, root_seed, output_path


def parse_config(src: str) -> ParsedConfig:
    try:
        doc = _toml.loads(src)
    except _toml.TOMLDecodeError as exc:
        raise ConfigFileError(f"TOML syntax error: {exc}") from None
    root = _Table(doc, "", src)
    experiment = root.sub("experiment")
    model_table = root.sub("model")
    root.finish()
    model = _parse_model(model_table, src)
    variant, mode, root_seed, output_path = _parse_experiment(experiment, src)
    return ParsedConfig(variant=variant, model=model, mode=mode,
                        root_seed=root_seed, output_path=output_path)


def load_config(path: str) -> ParsedConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            src = fh.read()
    except OSError as exc:
        raise ConfigFileError(f"cannot read {path}: {exc}") from None
    try:
        return parse_config(src)
    except ConfigFileError as exc:
        raise ConfigFileError(f"{path}: {exc}") from None


def default_toml() -> str:
    """The full default scenario, spelled out for editing."""
    return """\
# crossdock order-picking experiment, default scenario

[experiment]
variant = "base"              # base | buffered | buffered-crn
mode = "fixed"                # fixed | sequential
replications = 500            # used in fixed mode
confidence = 0.95
root_seed = 12345

[experiment.sequential]       # used in sequential mode
target_half_width = 0.5       # pounds, on Total Usage Cost
replication_cap = 999999
min_replications = 3

[model]
arrival_mean_minutes = 1.0
order_mix = [0.20, 0.25, 0.10, 0.15, 0.30]   # MIFQ, MIMQ, FIFQ, FIMQ, RIRQ
manual_pick_minutes = [2.0, 3.5, 5.0]        # triangular min, mode, max
auto_dispense_minutes = [0.5, 1.0, 1.5]
buffer_delay_minutes = [0.5, 1.0, 2.0]       # buffered variants only
picking_points = 4
unskilled_time_factor = 1.25                 # unskilled pick time multiplier
replication_length_minutes = 28800.0         # 30 days of two 8-hour shifts

[model.shifts]
windows = [[0.0, 480.0], [480.0, 480.0]]     # start, duration within a day
day_length_minutes = 1440.0

[model.skilled]
count_per_point = 2
busy_rate_per_hour = 12.0                    # pounds per hour
idle_rate_per_hour = 6.0
cost_per_use = 0.0

[model.unskilled]
count_per_point = 2
busy_rate_per_hour = 8.0
idle_rate_per_hour = 4.0
cost_per_use = 0.0

[model.auto]
count_per_point = 1
busy_rate_per_hour = 20.0
idle_rate_per_hour = 10.0
cost_per_use = 0.0
"""
