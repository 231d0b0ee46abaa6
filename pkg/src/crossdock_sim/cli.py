"""Command-line harness.

Commands: run, compare, validate, plan, trace.  Exit codes: 0 success,
1 usage or configuration error, 2 runtime failure, 3 validation-assertion
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import List, Optional

from .archive import ArchiveError, RunArchive
from .config import ConfigFileError, ParsedConfig, load_config
from .engine import SimulationError, Tracer
from .experiment import ExperimentSpec, FixedMode, Mode, SequentialMode, run_experiment
from .model import ConfigError, Variant, build_model, default_config, run_replication
from .quantiles import normal_ppf, two_sided_t
from .report import machine_comparison, render_comparison, render_run_summary
from .stats import SequentialConfig, paired_t_compare, variance_ratio_compare
from .streams import DEFAULT_ROOT_SEED
from .validate import run_validation

__all__ = ["main"]

MEASURE = "Total Usage Cost"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION = 3


class UsageError(ValueError):
    """Bad flag combination or value; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this harness reserves 2 for runtime
    # failures, so route parse errors to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_mode(text: str) -> Mode:
    if text == "sequential":
        return SequentialMode(SequentialConfig(target_half_width=0.5))
    if text.startswith("fixed:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--mode fixed:N needs an integer, got {text!r}") from None
        if n < 1:
            raise UsageError(f"--mode fixed:N needs N >= 1, got {n}")
        return FixedMode(n)
    raise UsageError(f"--mode must be 'fixed:N' or 'sequential', got {text!r}")


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2 ** 64:
        raise UsageError(f"--seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def _load(args) -> ParsedConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return ParsedConfig(variant=Variant.BASE, model=default_config(),
                        mode=FixedMode(500), root_seed=DEFAULT_ROOT_SEED)


def _resolve_variant(args, parsed: ParsedConfig) -> Variant:
    return Variant(args.variant) if args.variant else parsed.variant


def _resolve_seed(args, parsed: ParsedConfig) -> int:
    return _check_seed(args.seed if args.seed is not None else parsed.root_seed)


def _resolve_mode(args, parsed: ParsedConfig) -> Mode:
    mode = _parse_mode(args.mode) if args.mode else parsed.mode
    if isinstance(mode, SequentialMode) and (args.target is not None or args.cap is not None):
        rule = mode.rule
        try:
            mode = SequentialMode(SequentialConfig(
                target_half_width=args.target if args.target is not None else rule.target_half_width,
                confidence=rule.confidence,
                replication_cap=args.cap if args.cap is not None else rule.replication_cap,
                min_replications=rule.min_replications))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif isinstance(mode, FixedMode) and (args.target is not None or args.cap is not None):
        raise UsageError("--target/--cap apply to sequential mode only")
    return mode


# -- commands --------------------------------------------------------------

def _cmd_run(args) -> int:
    parsed = _load(args)
    spec = ExperimentSpec(
        variant=_resolve_variant(args, parsed),
        config=parsed.model,
        mode=_resolve_mode(args, parsed),
        root_seed=_resolve_seed(args, parsed),
        output_path=args.out if args.out else parsed.output_path,
    )

    def progress(done: int, half_width: Optional[float]) -> None:
        if done % 200 == 0:
            hw = f"{half_width:.4g}" if half_width is not None else "n/a"
            print(f"  {done} replications, half-width {hw}", file=sys.stderr)

    outcome = run_experiment(spec, workers=args.workers,
                             progress=progress if args.verbose else None)
    archive = outcome.archive
    print(render_run_summary(MEASURE, archive.stats, archive.stop_reason,
                             outcome.wall_seconds))
    if spec.output_path:
        print(f"archive written to {spec.output_path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = RunArchive.load(args.archive_a)
    b = RunArchive.load(args.archive_b)
    kinds = ("means", "variances") if args.kind == "both" else (args.kind,)
    blocks = []
    for kind in kinds:
        if kind == "means":
            report = paired_t_compare(a.costs, b.costs, alpha=args.alpha,
                                      identifier=MEASURE)
        else:
            report = variance_ratio_compare(a.costs, b.costs, alpha=args.alpha,
                                            identifier=MEASURE)
        blocks.append(report)
    print("\n\n".join(render_comparison(r) for r in blocks))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(machine_comparison(r) for r in blocks) + "\n")
        print(f"\ncomparison written to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    parsed = _load(args)
    report = run_validation(base=parsed.model,
                            variant=_resolve_variant(args, parsed),
                            root_seed=_resolve_seed(args, parsed))
    print(report.render())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _fmt_duration(seconds: float) -> str:
    if seconds < 120:
        return f"{seconds:.1f} s"
    if seconds < 7200:
        return f"{seconds / 60:.1f} min"
    if seconds < 2 * 86400:
        return f"{seconds / 3600:.1f} h"
    return f"{seconds / 86400:.1f} days"


def _cmd_plan(args) -> int:
    parsed = _load(args)
    if (args.archive is None) == (args.sd is None):
        raise UsageError("plan needs exactly one of --archive or --sd")
    confidence = 0.95
    if args.archive is not None:
        pilot = RunArchive.load(args.archive)
        if pilot.stats.sd is None:
            raise ArchiveError(f"{args.archive}: one replication is not enough to plan from")
        sd = pilot.stats.sd
        confidence = pilot.stats.confidence
        quantile = two_sided_t(confidence, pilot.stats.n - 1)
        source = f"pilot archive, n={pilot.stats.n}, t on {pilot.stats.n - 1} df"
    else:
        sd = args.sd
        if sd < 0:
            raise UsageError(f"--sd must be >= 0, got {sd}")
        quantile = normal_ppf(1.0 - (1.0 - confidence) / 2.0)
        source = "given sd, normal quantile"
    target = args.target
    if target is None and isinstance(parsed.mode, SequentialMode):
        target = parsed.mode.rule.target_half_width
    if target is None:
        raise UsageError("plan needs --target (or a config with a sequential target)")
    if target <= 0:
        raise UsageError(f"--target must be > 0, got {target}")
    estimate = 1 if sd == 0.0 else max(1, math.ceil((quantile * sd / target) ** 2))

    print(f"sd estimate: {sd:g} ({source})")
    print(f"target half-width: {target:g} at {confidence:.0%} confidence")
    print(f"estimated replications: {estimate}")

    variant = _resolve_variant(args, parsed)
    model = build_model(variant, parsed.model)
    start = time.perf_counter()
    run_replication(model, root_seed=_resolve_seed(args, parsed), replication_index=0)
    per_rep = time.perf_counter() - start
    print(f"per-replication cost: {per_rep:.3f} s (measured, variant={variant.value})")
    print(f"estimated wall time: {_fmt_duration(per_rep * estimate)}")
    return EXIT_OK


def _cmd_trace(args) -> int:
    parsed = _load(args)
    model = build_model(_resolve_variant(args, parsed), parsed.model)
    tracer = Tracer()
    run_replication(model, root_seed=_resolve_seed(args, parsed),
                    replication_index=0, tracer=tracer)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            tracer.write(fh)
        print(f"{len(tracer.events)} trace events written to {args.out}")
    else:
        for event in tracer.events:
            print(event.line())
    return EXIT_OK


# -- wiring ----------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="experiment config file (TOML)")
    parser.add_argument("--variant", choices=[v.value for v in Variant],
                        help="model variant (overrides the config)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="root seed, unsigned 64-bit (overrides the config)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crossdock-sim",
                     description="Crossdock order-picking simulation harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and archive the replications")
    _add_common(run)
    run.add_argument("--mode", metavar="MODE", help="fixed:N or sequential")
    run.add_argument("--target", type=float, metavar="HW",
                     help="sequential target half-width")
    run.add_argument("--cap", type=int, metavar="N", help="sequential replication cap")
    run.add_argument("--out", metavar="PATH", help="archive output path")
    run.add_argument("--workers", type=int, default=1, metavar="N",
                     help="worker processes (default 1)")
    run.add_argument("--verbose", action="store_true", help="progress to stderr")
    run.set_defaults(func=_cmd_run)

    compare = sub.add_parser("compare", help="compare two archives")
    compare.add_argument("archive_a")
    compare.add_argument("archive_b")
    compare.add_argument("--alpha", type=float, default=0.05,
                         help="significance level (default 0.05)")
    compare.add_argument("--kind", choices=["means", "variances", "both"],
                         default="both")
    compare.add_argument("--out", metavar="PATH", help="machine-readable output path")
    compare.set_defaults(func=_cmd_compare)

    validate = sub.add_parser("validate",
                              help="run the reduced-scenario validation checks")
    _add_common(validate)
    validate.set_defaults(func=_cmd_validate)

    plan = sub.add_parser("plan", help="estimate replications for a target half-width")
    _add_common(plan)
    plan.add_argument("--archive", metavar="PATH", help="pilot archive to read sd from")
    plan.add_argument("--sd", type=float, metavar="SD", help="sd estimate to plan from")
    plan.add_argument("--target", type=float, metavar="HW", help="target half-width")
    plan.set_defaults(func=_cmd_plan)

    trace = sub.add_parser("trace", help="run one replication and dump its event trace")
    _add_common(trace)
    trace.add_argument("--out", metavar="PATH", help="trace output path (default stdout)")
    trace.set_defaults(func=_cmd_trace)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigFileError, ConfigError) as exc:
        print(f"crossdock-sim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArchiveError, SimulationError, OSError, ValueError) as exc:
        print(f"crossdock-sim: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - unexpected failure path
        if os.environ.get("CROSSDOCK_SIM_DEBUG"):
            raise
        print(f"crossdock-sim: internal error: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
