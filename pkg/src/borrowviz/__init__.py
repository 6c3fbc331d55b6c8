"""borrowviz: diagrams for lifetime-related Rust compiler errors, plus
build-snapshot telemetry for mining error-resolution cost."""

from .diagnostics import (
    BuildReport,
    Diagnostic,
    SourcePosition,
    SourceSpan,
    filter_supported,
    parse_diagnostic_stream,
    run_build,
)
from .interpret import (
    DEFAULT_REGISTRY,
    Arrow,
    Region,
    Severity2,
    TailAnchor,
    Tip,
    VisualizationPlan,
    interpret,
    interpret_all,
)
from .layout import Geometry, LineExtent, TextMetrics, compute_geometry, measure_lines
from .render import DEFAULT_PALETTE, Palette, SvgDocument, render_html_report, render_svg
from .telemetry import (
    BuildSnapshot,
    CostRow,
    ErrorFingerprint,
    ResolutionSession,
    aggregate,
    analyze_ledger,
    capped_interval,
    compute_arc,
    detect_sessions,
    record_build,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
