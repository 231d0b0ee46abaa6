"""Discrete-event simulation of a crossdock order-picking process.

Three model variants (base, buffered, buffered with common random numbers)
share one scenario configuration; an experiment harness runs fixed or
sequential replication designs, archives the replication series, and
compares runs with paired-t and variance-ratio tests.
"""

from .archive import ARCHIVE_VERSION, ArchiveError, RunArchive
from .config import ConfigFileError, ParsedConfig, default_toml, load_config, parse_config
from .engine import Simulation, SimulationError, Tracer
from .experiment import (ExperimentOutcome, ExperimentSpec, FixedMode, SequentialMode,
                         run_experiment)
from .model import (BatchArrivals, ConfigError, FailureConfig, Model, ModelConfig,
                    Order, OrderType, ReplicationResult, ResourceClassConfig, Variant,
                    build_model, default_config, run_replication, total_usage_cost)
from .resources import ALWAYS_ON, Resource, ResourceUsage, ShiftSchedule
from .stats import (ComparisonReport, SequentialConfig, SequentialState, SummaryStats,
                    expected_replications, half_width, paired_t_compare,
                    sequential_should_continue, summarize, variance_ratio_compare)
from .streams import (DEFAULT_ROOT_SEED, Discrete, Exponential, StreamSet, Triangular,
                      substream)
from .validate import ValidationReport, run_validation

__version__ = "0.1.0"

__all__ = [
    "ARCHIVE_VERSION", "ArchiveError", "RunArchive",
    "ConfigFileError", "ParsedConfig", "default_toml", "load_config", "parse_config",
    "Simulation", "SimulationError", "Tracer",
    "ExperimentOutcome", "ExperimentSpec", "FixedMode", "SequentialMode",
    "run_experiment",
    "BatchArrivals", "ConfigError", "FailureConfig", "Model", "ModelConfig",
    "Order", "OrderType", "ReplicationResult", "ResourceClassConfig", "Variant",
    "build_model", "default_config", "run_replication", "total_usage_cost",
    "ALWAYS_ON", "Resource", "ResourceUsage", "ShiftSchedule",
    "ComparisonReport", "SequentialConfig", "SequentialState", "SummaryStats",
    "expected_replications", "half_width", "paired_t_compare",
    "sequential_should_continue", "summarize", "variance_ratio_compare",
    "DEFAULT_ROOT_SEED", "Discrete", "Exponential", "StreamSet", "Triangular",
    "substream",
    "ValidationReport", "run_validation",
    "__version__",
]
