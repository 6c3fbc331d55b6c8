"""Pixel placement of a diagram next to monospace-rendered code.

All coordinates are relative to the top-left corner of the diagram's first
(anchor) line. Every offset is a multiple of the text metrics, so scaling
the metrics (and the margin) by a factor scales all coordinates by exactly
that factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MissingExtent, RangeOutOfBounds
from .interpret import VisualizationPlan

# Text baselines sit this fraction of the font size below the vertical center.
# Kept binary-exact (3/8) so scaled layouts stay bit-identical multiples.
_BASELINE_FRACTION = 0.375
# Horizontal run of an arrow, in character widths.
_ARROW_RUN = 6


@dataclass(frozen=True)
class TextMetrics:
    font_size: float = 14.0
    line_height: float = 21.0
    char_width: float = 8.0
    tab_width: int = 4

    def __post_init__(self):
        if min(self.font_size, self.line_height, self.char_width, self.tab_width) <= 0:
            raise ValueError("all text metrics must be strictly positive")

    def scaled(self, factor: float) -> "TextMetrics":
        return TextMetrics(
            font_size=self.font_size * factor,
            line_height=self.line_height * factor,
            char_width=self.char_width * factor,
            tab_width=self.tab_width,
        )


@dataclass(frozen=True)
class LineExtent:
    line: int
    visual_columns: int

    def __post_init__(self):
        if self.visual_columns < 0:
            raise ValueError("visual_columns must be >= 0")


def measure_lines(source: str, first_line: int, last_line: int, metrics: TextMetrics) -> list[LineExtent]:
    """Visual column count per line in [first_line, last_line], tabs expanded."""
    lines = source.splitlines()
    if first_line < 1 or last_line > len(lines) or first_line > last_line:
        raise RangeOutOfBounds(f"lines {first_line}..{last_line} outside file of {len(lines)} lines")
    return [
        LineExtent(line=n, visual_columns=len(lines[n - 1].expandtabs(metrics.tab_width)))
        for n in range(first_line, last_line + 1)
    ]


@dataclass(frozen=True)
class PlacedRegion:
    x: float
    y_top: float
    y_bottom: float
    cap_half_width: float
    label_x: float
    label_y: float


@dataclass(frozen=True)
class PlacedArrow:
    tail_x: float
    tail_y: float
    head_x: float
    head_y: float
    label_x: float
    label_y: float


@dataclass(frozen=True)
class PlacedText:
    x: float
    y: float
    text: str


@dataclass(frozen=True)
class Geometry:
    x_offset: float
    top_line: int
    height_lines: int
    width: float
    height: float
    regions: tuple[PlacedRegion, ...] = ()
    arrows: tuple[PlacedArrow, ...] = ()
    tip_lines: tuple[PlacedText, ...] = ()


def compute_geometry(
    plan: VisualizationPlan,
    extents: list[LineExtent],
    metrics: TextMetrics,
    margin: float = 16.0,
) -> Geometry:
    """Place every plan component in pixel space.

    x_offset clears the widest measured code line plus the margin, so the
    diagram never overlaps the code. Arrowheads sit at line vertical
    centers; region end points sit on line boundaries.
    """
    if not plan.regions and not plan.arrows:
        return Geometry(x_offset=0.0, top_line=1, height_lines=0, width=0.0, height=0.0)

    anchor = plan.anchor_line
    last = plan.last_line
    by_line = {e.line: e for e in extents}
    for line in range(anchor, last + 1):
        if line not in by_line:
            raise MissingExtent(f"no extent for line {line}")
    max_cols = max(e.visual_columns for e in extents)
    x0 = max_cols * metrics.char_width + margin

    u = metrics.char_width
    lh = metrics.line_height
    baseline = _BASELINE_FRACTION * metrics.font_size

    def y_top_of(line: int) -> float:
        return (line - anchor) * lh

    def y_center_of(line: int) -> float:
        return (line - anchor) * lh + lh / 2

    placed_regions: list[PlacedRegion] = []
    for i, region in enumerate(plan.regions):
        rx = x0 + u * (1 + 2 * i)
        y_top = y_top_of(region.start_line)
        y_bottom = y_top_of(region.end_line) + lh
        mid = (y_top + y_bottom) / 2
        placed_regions.append(
            PlacedRegion(
                x=rx,
                y_top=y_top,
                y_bottom=y_bottom,
                cap_half_width=u / 2,
                label_x=rx + u,
                label_y=mid + baseline,
            )
        )

    arrow_zone = x0 + u * (2 * len(plan.regions) + 2)
    placed_arrows: list[PlacedArrow] = []
    for arrow in plan.arrows:
        head_y = y_center_of(arrow.line)
        head_x = arrow_zone + u * _ARROW_RUN
        anchor_spec = arrow.tail_anchor
        if anchor_spec.kind == "region_end":
            region_geom = placed_regions[anchor_spec.region_index]
            tail_x = region_geom.x
            tail_y = region_geom.y_top if anchor_spec.region_which == "start" else region_geom.y_bottom
        else:
            tail_x = arrow_zone
            tail_y = head_y
        placed_arrows.append(
            PlacedArrow(
                tail_x=tail_x,
                tail_y=tail_y,
                head_x=head_x,
                head_y=head_y,
                label_x=head_x + u,
                label_y=head_y + baseline,
            )
        )

    body_height = (last - anchor + 1) * lh
    tip_lines: list[PlacedText] = []
    for i, text in enumerate(plan.tip.lines):
        tip_lines.append(
            PlacedText(x=x0, y=body_height + lh * (i + 1) - (lh / 2) + baseline, text=text)
        )

    height_lines = (last - anchor + 1) + len(plan.tip.lines)
    height = height_lines * lh
    label_ends = [r.label_x + len(plan.regions[i].label) * u for i, r in enumerate(placed_regions)]
    label_ends += [a.label_x + len(plan.arrows[i].label) * u for i, a in enumerate(placed_arrows)]
    label_ends += [t.x + len(t.text) * u for t in tip_lines]
    # width spans from the code's left edge so SVG coordinates stay absolute
    width = max(label_ends) + u

    return Geometry(
        x_offset=x0,
        top_line=anchor,
        height_lines=height_lines,
        width=width,
        height=height,
        regions=tuple(placed_regions),
        arrows=tuple(placed_arrows),
        tip_lines=tuple(tip_lines),
    )
