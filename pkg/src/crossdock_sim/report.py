"""Console rendering of comparison tests and run summaries.

The comparison block mimics the fixed-column output-analyser layout the
study tables were read from, so downstream checks can string-match the
column headers.  A tab-delimited twin of each block is available for
machine consumption.
"""

from __future__ import annotations

from typing import List, Optional

from .stats import ComparisonReport, SummaryStats

__all__ = [
    "format_value", "comparison_headers", "comparison_cells", "verdict_line",
    "render_comparison", "machine_comparison", "render_run_summary",
]


def format_value(x: float) -> str:
    """Three significant figures; wide magnitudes in e+NNN scientific form.

    Matches the output-analyser convention: 21.9, 154, 0.867 stay plain,
    1750 becomes 1.75e+003, 149000 becomes 1.49e+005.
    """
    if x == 0.0:
        return "0"
    a = abs(x)
    if 0.001 <= a < 999.5:
        return f"{x:.3g}"
    mantissa, exponent = f"{x:.2e}".split("e")
    return f"{mantissa}e{int(exponent):+04d}"


def _ci_label(alpha: float) -> str:
    return f"{1.0 - alpha:.3f}"


def comparison_headers(report: ComparisonReport) -> List[str]:
    ci = _ci_label(report.alpha)
    if report.kind == "means":
        middle = ["ESTD. MEAN DIFFERENCE", "STANDARD DEVIATION", f"{ci} C.I. HALF-WIDTH"]
    else:
        # The upper limit prints before the lower one, as in the source tables.
        middle = ["VARIANCE RATIO", f"UPPER {ci} C.I.LIMIT", f"LOWER {ci} C.I.LIMIT"]
    return ["IDENTIFIER"] + middle + ["MINIMUM VALUE", "MAXIMUM VALUE", "NUMBER OF OBS"]


def comparison_cells(report: ComparisonReport) -> List[str]:
    if report.kind == "means":
        middle = [format_value(report.estimate), format_value(report.sd),
                  format_value(report.half_width)]
    else:
        middle = [format_value(report.estimate), format_value(report.ci_high),
                  format_value(report.ci_low)]
    return [report.identifier] + middle + [
        f"{format_value(report.min_a)} {format_value(report.min_b)}",
        f"{format_value(report.max_a)} {format_value(report.max_b)}",
        f"{report.n_a} {report.n_b}",
    ]


def verdict_line(report: ComparisonReport) -> str:
    noun = "MEANS" if report.kind == "means" else "VARIANCES"
    level = f"{report.alpha:g}"
    if report.reject:
        return f"REJECT H0 => {noun} ARE NOT EQUAL AT {level} LEVEL"
    return f"FAIL TO REJECT H0 => {noun} ARE EQUAL AT {level} LEVEL"


def _title(report: ComparisonReport) -> str:
    return "Paired-T Means Comparison:" if report.kind == "means" else "Variances Comparison:"


def render_comparison(report: ComparisonReport) -> str:
    """Fixed-column comparison block with a verdict line."""
    headers = comparison_headers(report)
    cells = comparison_cells(report)
    widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
    head = "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()
    row = "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([_title(report), "", head, row, "", verdict_line(report)])


def machine_comparison(report: ComparisonReport) -> str:
    """Tab-delimited twin of render_comparison for parsing."""
    return "\n".join([
        "\t".join(comparison_headers(report)),
        "\t".join(comparison_cells(report)),
        verdict_line(report),
    ])


def render_run_summary(measure: str, stats: SummaryStats, reason: str,
                       wall_seconds: Optional[float] = None) -> str:
    """Console summary printed after an experiment run."""
    sd = format_value(stats.sd) if stats.sd is not None else "n/a"
    hw = format_value(stats.half_width) if stats.half_width is not None else "n/a"
    lines = [
        f"{measure}: n={stats.n}  mean={format_value(stats.mean)}  sd={sd}",
        f"{stats.confidence:.3f} C.I. half-width: {hw}   "
        f"min={format_value(stats.min)}  max={format_value(stats.max)}",
        f"stop reason: {reason}",
    ]
    if wall_seconds is not None:
        lines.append(f"wall time: {wall_seconds:.1f} s")
    return "\n".join(lines)
