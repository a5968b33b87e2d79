"""CSV and plain-text renderings of a :class:`ConditionReport`."""

from __future__ import annotations

import json
from pathlib import Path

from ..siib import relative_gain
from .grid import ConditionReport

CSV_HEADER = "system,noise,snr_db,n,mean_bits_per_sec,median_bits_per_sec,rel_gain_pct"


def _gain(report: ConditionReport, system, cond, baseline):
    if baseline is None:
        return None
    if baseline not in report.systems:
        raise ValueError(f"baseline {baseline!r} is not one of the report's systems")
    return relative_gain(report.cell(system, cond).mean, report.cell(baseline, cond).mean)


def format_csv(report: ConditionReport, baseline: str | None = None) -> str:
    """One line per (system, condition); LF endings, 4-decimal floats.

    ``rel_gain_pct`` is the mean's gain over the baseline system's mean
    in the same condition, left empty without a baseline.
    """
    lines = [CSV_HEADER]
    for system in report.systems:
        for cond in report.conditions:
            cell = report.cell(system, cond)
            gain = _gain(report, system, cond, baseline)
            lines.append(",".join([
                system,
                cond.noise_type.value,
                f"{cond.snr_db:.4f}",
                str(cell.n),
                f"{cell.mean:.4f}",
                f"{cell.median:.4f}",
                "" if gain is None else f"{gain:.4f}",
            ]))
    return "\n".join(lines) + "\n"


def format_table(report: ConditionReport, baseline: str | None = None) -> str:
    """Aligned text table: systems as rows, conditions as columns."""
    header = ["system"] + [c.label for c in report.conditions]
    rows = [header]
    for system in report.systems:
        rows.append([f"{system} (mean)"] +
                    [f"{report.cell(system, c).mean:.2f}" for c in report.conditions])
        rows.append([f"{system} (median)"] +
                    [f"{report.cell(system, c).median:.2f}" for c in report.conditions])
        if baseline is not None:
            rows.append([f"{system} (gain)"] +
                        [f"{_gain(report, system, c, baseline):.1f}%" for c in report.conditions])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    out = []
    for k, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(row[1:], widths[1:])]
        out.append("  ".join(cells).rstrip())
        if k == 0:
            out.append("-" * len(out[0]))
    return "\n".join(out) + "\n"


def emit_report(report: ConditionReport, path, format: str = "csv",
                baseline: str | None = None) -> Path:
    """Write the report as ``csv`` or ``table`` to `path`."""
    if format == "csv":
        text = format_csv(report, baseline)
    elif format == "table":
        text = format_table(report, baseline)
    else:
        raise ValueError(f"unknown report format {format!r}")
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def write_manifest(report: ConditionReport, path) -> Path:
    """Config snapshot, seed and corpus listing as sorted JSON."""
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(report.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
