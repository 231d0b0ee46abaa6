"""Persisted replication series: one delimited text file per experiment run.

Layout: a commented JSON header carrying the fully resolved configuration,
seed and format version; one tab-delimited row per replication; a commented
JSON footer with the summary statistics and the stop reason.  Floats are
written with repr() so a reloaded archive is bit-identical to the run that
produced it, and the footer can be recomputed from the rows exactly.

No wall-clock timestamps go into the file: two runs of the same (config,
seed) must produce byte-identical archives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .model import Model, ModelConfig, ReplicationResult
from .stats import FIXED_COUNT, SummaryStats, summarize

__all__ = ["ARCHIVE_VERSION", "ArchiveError", "RunArchive", "resolved_config"]

ARCHIVE_VERSION = 1

_MAGIC = "# crossdock-sim archive v"

# Row columns that parse as integers; everything else is a float.
_INT_COLUMNS = ("replication", "created", "disposed", "in_system")
_INT_SUFFIX = ".uses"


class ArchiveError(ValueError):
    """Raised when an archive file cannot be parsed or fails verification."""


def resolved_config(model: Model, root_seed: int) -> Dict:
    """Every knob of a run as plain data, sufficient to re-execute it."""
    cfg: ModelConfig = model.config
    out = {
        "variant": model.variant.value,
        "root_seed": root_seed,
        "stream_policy": model.stream_policy,
        "arrival": cfg.arrival.as_dict(),
        "order_mix": cfg.order_mix.as_dict(),
        "manual_pick": cfg.manual_pick.as_dict(),
        "auto_dispense": cfg.auto_dispense.as_dict(),
        "buffer_delay": cfg.buffer_delay.as_dict() if cfg.buffer_delay else None,
        "failure": None,
        "picking_points": cfg.picking_points,
        "unskilled_time_factor": cfg.unskilled_time_factor,
        "replication_length": cfg.replication_length,
        "shifts": cfg.shifts.as_dict(),
    }
    for class_name in ("skilled", "unskilled", "auto"):
        rc = getattr(cfg, class_name)
        out[class_name] = {
            "count_per_point": rc.count_per_point,
            "busy_rate_per_hour": rc.busy_rate_per_hour,
            "idle_rate_per_hour": rc.idle_rate_per_hour,
            "cost_per_use": rc.cost_per_use,
        }
    if cfg.failure is not None:
        out["failure"] = {"up": cfg.failure.up.as_dict(),
                          "repair": cfg.failure.repair.as_dict()}
    return out


def _cell(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _json_block(line: str, prefix: str) -> Dict:
    try:
        return json.loads(line[len(prefix):])
    except json.JSONDecodeError as exc:
        raise ArchiveError(f"bad {prefix.strip('# :')} JSON: {exc}") from None


def _stats_dict(stats: SummaryStats) -> Dict:
    return {"n": stats.n, "mean": stats.mean, "sd": stats.sd, "min": stats.min,
            "max": stats.max, "confidence": stats.confidence,
            "half_width": stats.half_width}


def _stats_from_dict(d: Dict) -> SummaryStats:
    return SummaryStats(n=d["n"], mean=d["mean"], sd=d["sd"], min=d["min"],
                        max=d["max"], confidence=d["confidence"],
                        half_width=d["half_width"])


@dataclass
class RunArchive:
    """One experiment run: header, replication rows, summary footer."""

    header: Dict
    columns: List[str]
    rows: List[tuple]
    stats: SummaryStats
    stop_reason: str

    # -- construction ------------------------------------------------------

    @classmethod
    def from_results(cls, model: Model, root_seed: int, mode: Dict,
                     results: Sequence[ReplicationResult],
                     confidence: float = 0.95,
                     stop_reason: str = FIXED_COUNT) -> "RunArchive":
        if not results:
            raise ArchiveError("an archive needs at least one replication")
        header = {
            "artifact_version": ARCHIVE_VERSION,
            "measure": "total_usage_cost",
            "mode": mode,
            "config": resolved_config(model, root_seed),
        }
        names = [u.name for u in results[0].resources]
        columns = list(_INT_COLUMNS[:1]) + ["total_usage_cost"] + list(_INT_COLUMNS[1:])
        for name in names:
            columns += [f"{name}.busy", f"{name}.idle", f"{name}.uses"]
        rows = []
        for r in results:
            if [u.name for u in r.resources] != names:
                raise ArchiveError("replications disagree on the resource set")
            row = [r.replication_index, r.total_usage_cost, r.created, r.disposed,
                   r.in_system]
            for u in r.resources:
                row += [u.busy_minutes, u.idle_minutes, u.use_count]
            rows.append(tuple(row))
        stats = summarize([r.total_usage_cost for r in results], confidence)
        return cls(header=header, columns=columns, rows=rows, stats=stats,
                   stop_reason=stop_reason)

    # -- access ------------------------------------------------------------

    @property
    def costs(self) -> List[float]:
        i = self.columns.index("total_usage_cost")
        return [row[i] for row in self.rows]

    def column(self, name: str) -> List:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def verify(self) -> None:
        """Check the structural invariants; raise ArchiveError on any break."""
        if len(self.rows) != self.stats.n:
            raise ArchiveError(
                f"row count {len(self.rows)} != footer n {self.stats.n}")
        recomputed = summarize(self.costs, self.stats.confidence)
        if recomputed != self.stats:
            raise ArchiveError(
                f"footer does not recompute from rows: {recomputed} != {self.stats}")
        indices = self.column("replication")
        if indices != list(range(len(indices))):
            raise ArchiveError(f"replication indices are not 0..n-1: {indices[:5]}...")

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{_MAGIC}{self.header['artifact_version']}",
                 "# header: " + json.dumps(self.header, sort_keys=True),
                 "\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(_cell(v) for v in row))
        footer = dict(_stats_dict(self.stats), stop_reason=self.stop_reason)
        lines.append("# footer: " + json.dumps(footer, sort_keys=True))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "RunArchive":
        lines = text.splitlines()
        if not lines or not lines[0].startswith(_MAGIC):
            raise ArchiveError("not an archive: missing magic line")
        version = int(lines[0][len(_MAGIC):])
        if version != ARCHIVE_VERSION:
            raise ArchiveError(f"unsupported archive version {version}")
        header = columns = footer = None
        rows: List[tuple] = []
        is_int: List[bool] = []
        for line in lines[1:]:
            if line.startswith("# header: "):
                header = _json_block(line, "# header: ")
            elif line.startswith("# footer: "):
                footer = _json_block(line, "# footer: ")
            elif line.startswith("#") or not line.strip():
                continue
            elif columns is None:
                columns = line.split("\t")
                is_int = [c in _INT_COLUMNS or c.endswith(_INT_SUFFIX) for c in columns]
            else:
                cells = line.split("\t")
                if len(cells) != len(columns):
                    raise ArchiveError(
                        f"row has {len(cells)} cells, expected {len(columns)}")
                rows.append(tuple(int(c) if flag else float(c)
                                  for c, flag in zip(cells, is_int)))
        if header is None or columns is None or footer is None:
            raise ArchiveError("archive is missing header, columns or footer")
        stop = footer.pop("stop_reason")
        return cls(header=header, columns=columns, rows=rows,
                   stats=_stats_from_dict(footer), stop_reason=stop)

    @classmethod
    def load(cls, path) -> "RunArchive":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                archive = cls.from_text(fh.read())
            archive.verify()
        except ArchiveError as exc:
            raise ArchiveError(f"{path}: {exc}") from None
        return archive
