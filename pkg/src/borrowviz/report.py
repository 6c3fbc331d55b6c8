"""Delimited cost reports plus an optional violin-plot figure."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .telemetry import CostRow, ResolutionSession

REPORT_COLUMNS = ("code", "description", "count", "total_share", "avg_seconds", "stddev_seconds")


def rows_to_csv(rows: list[CostRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in rows:
        writer.writerow(
            [r.code, r.description, r.session_count,
             f"{r.total_share:.6f}", f"{r.avg_seconds:.3f}", f"{r.stddev_seconds:.3f}"]
        )
    return buf.getvalue()


def rows_to_table(rows: list[CostRow]) -> str:
    """Aligned text table with the same six columns as the CSV."""
    header = ("Error", "Description", "#", "Total", "Avg", "Std. Dev.")
    cells = [header] + [
        (
            r.code,
            r.description,
            str(r.session_count),
            f"{r.total_share * 100:.1f}%",
            f"{r.avg_seconds:.0f}s",
            f"{r.stddev_seconds:.0f}s",
        )
        for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def sessions_to_csv(sessions: list[ResolutionSession]) -> str:
    """Per-session (code, arc) pairs; the raw data behind the violin plot."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["code", "arc_seconds"])
    for s in sessions:
        writer.writerow([s.fingerprint.code, f"{s.arc_seconds:.3f}"])
    return buf.getvalue()


def render_violin(sessions: list[ResolutionSession], path: str | Path) -> None:
    """Log-scale violin plot of per-session resolution cost by error code."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_code: dict[str, list[float]] = {}
    for s in sessions:
        if s.arc_seconds > 0:
            by_code.setdefault(s.fingerprint.code, []).append(s.arc_seconds)
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(by_code) + 2), 4.5))
    if by_code:
        codes = sorted(by_code, key=lambda c: -sum(by_code[c]))
        data = [by_code[c] for c in codes]
        positions = list(range(1, len(codes) + 1))
        ax.violinplot(data, positions=positions, showmedians=True)
        for pos, values in zip(positions, data):
            ax.scatter([pos] * len(values), values, s=12, color="#303030", alpha=0.6, zorder=3)
        ax.set_xticks(positions)
        ax.set_xticklabels(codes, rotation=45, ha="right")
        ax.set_yscale("log")
    ax.set_ylabel("resolution cost (s, log scale)")
    ax.set_xlabel("error code")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
