"""Emit diagrams as SVG documents and standalone HTML reports."""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from .interpret import Severity2, VisualizationPlan
from .layout import Geometry, TextMetrics, compute_geometry, measure_lines

# Gutter between horizontally stacked diagrams, in character widths.
_STACK_GUTTER_CHARS = 2


@dataclass(frozen=True)
class Palette:
    error: str = "#d03030"
    info_primary: str = "#3060d0"  # first information component
    info_secondary: str = "#8040c0"  # the rest


DEFAULT_PALETTE = Palette()


@dataclass(frozen=True)
class SvgDocument:
    text: str
    width: float
    height: float


def _fmt(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _component_colors(plan: VisualizationPlan, palette: Palette) -> tuple[list[str], list[str]]:
    """Colors for regions and arrows, in document order."""
    info_seen = 0
    region_colors: list[str] = []
    arrow_colors: list[str] = []
    for component, colors in [(r, region_colors) for r in plan.regions] + [
        (a, arrow_colors) for a in plan.arrows
    ]:
        if component.severity == Severity2.ERROR:
            colors.append(palette.error)
        else:
            colors.append(palette.info_primary if info_seen == 0 else palette.info_secondary)
            info_seen += 1
    return region_colors, arrow_colors


def render_svg(
    plan: VisualizationPlan, geom: Geometry, palette: Palette = DEFAULT_PALETTE
) -> SvgDocument:
    """Render one placed plan as a standalone SVG 1.1 document.

    Coordinates are absolute from the code's left edge, so the document's
    minimum drawn x shows the non-overlap guarantee directly. Output is
    byte-deterministic for identical inputs.
    """
    region_colors, arrow_colors = _component_colors(plan, palette)
    if palette.error not in region_colors + arrow_colors:
        raise ValueError("plan has no error-severity component")

    # Derived purely from geometry so everything scales with the metrics.
    unit = geom.regions[0].cap_half_width * 2 if geom.regions else 8.0
    if geom.arrows:
        unit = (geom.arrows[0].label_x - geom.arrows[0].head_x) or unit
    stroke = unit / 4
    head = unit * 0.75

    font_size = None  # inferred below from tip baseline spacing when possible

    parts: list[str] = []
    for i, (region, placed, color) in enumerate(
        zip(plan.regions, geom.regions, region_colors)
    ):
        body = [
            f'<line class="region-line" x1="{_fmt(placed.x)}" y1="{_fmt(placed.y_top)}" '
            f'x2="{_fmt(placed.x)}" y2="{_fmt(placed.y_bottom)}" stroke-width="{_fmt(stroke)}"/>'
        ]
        for which, y, is_open, direction in (
            ("start", placed.y_top, region.open_start, -1),
            ("end", placed.y_bottom, region.open_end, 1),
        ):
            if is_open:
                tip_y = y + direction * head
                body.append(
                    f'<path class="region-open-{which}" data-direction="{"down" if direction == 1 else "up"}" '
                    f'd="M {_fmt(placed.x - placed.cap_half_width)} {_fmt(y)} '
                    f'L {_fmt(placed.x + placed.cap_half_width)} {_fmt(y)} '
                    f'L {_fmt(placed.x)} {_fmt(tip_y)} Z" stroke="none"/>'
                )
            else:
                body.append(
                    f'<line class="region-cap-{which}" x1="{_fmt(placed.x - placed.cap_half_width)}" '
                    f'y1="{_fmt(y)}" x2="{_fmt(placed.x + placed.cap_half_width)}" y2="{_fmt(y)}" '
                    f'stroke-width="{_fmt(stroke)}"/>'
                )
        body.append(
            f'<text class="region-label" x="{_fmt(placed.label_x)}" y="{_fmt(placed.label_y)}" '
            f'stroke="none">{escape(region.label)}</text>'
        )
        parts.append(
            f'<g id="region-{i}" data-component="region" stroke="{color}" fill="{color}">'
            + "".join(body)
            + "</g>"
        )

    for i, (arrow, placed, color) in enumerate(zip(plan.arrows, geom.arrows, arrow_colors)):
        body = [
            f'<line class="arrow-line" x1="{_fmt(placed.tail_x)}" y1="{_fmt(placed.tail_y)}" '
            f'x2="{_fmt(placed.head_x)}" y2="{_fmt(placed.head_y)}" stroke-width="{_fmt(stroke)}"/>',
            f'<path class="arrow-head" d="M {_fmt(placed.head_x + head)} {_fmt(placed.head_y)} '
            f'L {_fmt(placed.head_x)} {_fmt(placed.head_y - head / 2)} '
            f'L {_fmt(placed.head_x)} {_fmt(placed.head_y + head / 2)} Z" stroke="none"/>',
            f'<text class="arrow-label" x="{_fmt(placed.label_x)}" y="{_fmt(placed.label_y)}" '
            f'stroke="none">{escape(arrow.label)}</text>',
        ]
        parts.append(
            f'<g id="arrow-{i}" data-component="arrow" stroke="{color}" fill="{color}">'
            + "".join(body)
            + "</g>"
        )

    tip_texts = "".join(
        f'<text class="tip-line" x="{_fmt(t.x)}" y="{_fmt(t.y)}">{escape(t.text)}</text>'
        for t in geom.tip_lines
    )
    parts.append(f'<g id="tip" data-component="tip" fill="{palette.error}">{tip_texts}</g>')

    # Font size proportional to the line spacing of the geometry.
    line_h = geom.height / geom.height_lines if geom.height_lines else 16.0
    font_size = line_h * 2 / 3

    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(geom.width)}" height="{_fmt(geom.height)}" '
        f'viewBox="0 0 {_fmt(geom.width)} {_fmt(geom.height)}" '
        f'font-family="monospace" font-size="{_fmt(font_size)}" data-code="{escape(plan.code)}">'
        + "".join(parts)
        + "</svg>"
    )
    return SvgDocument(text=svg, width=geom.width, height=geom.height)


def _stack_plans(
    plans: list[VisualizationPlan], geoms: list[Geometry], gutter: float
) -> list[float]:
    """Horizontal shift per plan so vertically overlapping diagrams stack."""
    shifts: list[float] = []
    placed: list[tuple[int, int, float]] = []  # (top_line, bottom_line, right_x)
    for plan, geom in zip(plans, geoms):
        top = geom.top_line
        bottom = geom.top_line + geom.height_lines - 1
        left = geom.x_offset
        for p_top, p_bottom, p_right in placed:
            if top <= p_bottom and bottom >= p_top:
                left = max(left, p_right + gutter)
        shift = left - geom.x_offset
        shifts.append(shift)
        placed.append((top, bottom, shift + geom.width))
    return shifts


def render_html_report(
    source: str,
    plans: list[VisualizationPlan],
    metrics: TextMetrics,
    margin: float = 16.0,
    palette: Palette = DEFAULT_PALETTE,
    title: str = "borrowviz report",
) -> str:
    """Self-contained HTML page: code on the left, diagrams to its right.

    Plans whose line ranges overlap are stacked horizontally with a fixed
    gutter. Each plan also gets a collapsible section below the code.
    """
    line_count = len(source.splitlines())
    geoms: list[Geometry] = []
    ordered = sorted(plans, key=lambda p: (p.anchor_line, p.code))
    for plan in ordered:
        last_covered = min(line_count, plan.last_line + len(plan.tip.lines))
        extents = measure_lines(source, plan.anchor_line, max(plan.anchor_line, last_covered), metrics)
        geoms.append(compute_geometry(plan, extents, metrics, margin))
    shifts = _stack_plans(ordered, geoms, gutter=_STACK_GUTTER_CHARS * metrics.char_width)

    overlays: list[str] = []
    sections: list[str] = []
    for i, (plan, geom, shift) in enumerate(zip(ordered, geoms, shifts)):
        svg = render_svg(plan, geom, palette)
        top = (geom.top_line - 1) * metrics.line_height
        overlays.append(
            f'<div class="diagram" data-plan="{i}" data-left="{_fmt(geom.x_offset + shift)}" '
            f'style="position:absolute;left:{_fmt(shift)}px;top:{_fmt(top)}px;pointer-events:none">'
            f"{svg.text}</div>"
        )
        tip_html = "<br>".join(escape(t) for t in plan.tip.lines)
        sections.append(
            f'<details data-plan="{i}"><summary>{escape(plan.code)} at line '
            f"{plan.anchor_line} of {escape(plan.file)}</summary>"
            f'<p class="tip">{tip_html}</p>{svg.text}</details>'
        )

    style = (
        "body{background:#ffffff;color:#202020;margin:16px}"
        f"pre.code{{margin:0;font-family:monospace;font-size:{_fmt(metrics.font_size)}px;"
        f"line-height:{_fmt(metrics.line_height)}px;tab-size:{metrics.tab_width}}}"
        "details{margin-top:12px;border:1px solid #cccccc;padding:6px}"
    )
    return (
        "<!DOCTYPE html>\n"
        f'<html><head><meta charset="utf-8"><title>{escape(title)}</title>'
        f"<style>{style}</style></head><body>"
        f'<div class="stage" style="position:relative">'
        f'<pre class="code">{escape(source.expandtabs(metrics.tab_width))}</pre>'
        + "".join(overlays)
        + "</div>"
        + (f'<section class="plans">{"".join(sections)}</section>' if sections else "")
        + "</body></html>\n"
    )
