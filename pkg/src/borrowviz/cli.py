"""Command-line entry point: check, plan, record, analyze, report."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import telemetry
from .diagnostics import run_build
from .errors import BorrowvizError
from .interpret import DEFAULT_REGISTRY, VisualizationPlan, interpret_all
from .layout import LineExtent, TextMetrics, compute_geometry, measure_lines
from .render import DEFAULT_PALETTE, Palette, render_html_report, render_svg
from .report import rows_to_csv, rows_to_table, render_violin, sessions_to_csv

LEDGER_ENV_VAR = "BORROWVIZ_LEDGER"

EXIT_CLEAN = 0
EXIT_ERRORS = 1
EXIT_FAILURE = 2


@dataclass
class Config:
    workspace: Path = Path(".")
    output_dir: Path = Path("borrowviz-out")
    ledger_path: Path = Path("borrowviz-ledger.jsonl")
    metrics: TextMetrics = field(default_factory=TextMetrics)
    palette: Palette = DEFAULT_PALETTE
    margin: float = 16.0
    cap_seconds: float = telemetry.DEFAULT_CAP_SECONDS
    codes: list[str] | None = None  # registry override

    def registry(self):
        if self.codes is None:
            return DEFAULT_REGISTRY
        unknown = [c for c in self.codes if c not in DEFAULT_REGISTRY]
        if unknown:
            raise BorrowvizError(f"no interpretation rule for code(s): {', '.join(unknown)}")
        return {c: DEFAULT_REGISTRY[c] for c in self.codes}


def _source_loader(workspace: Path):
    cache: dict[str, str | None] = {}

    def load(file: str) -> str | None:
        if file not in cache:
            path = Path(file)
            if not path.is_absolute():
                path = workspace / path
            try:
                cache[file] = path.read_text()
            except (OSError, UnicodeDecodeError):
                cache[file] = None
        return cache[file]

    return load


def _plan_svg(plan: VisualizationPlan, source: str | None, config: Config) -> str:
    metrics = config.metrics
    if source:
        line_count = len(source.splitlines())
        last = min(line_count, plan.last_line + len(plan.tip.lines))
        extents = measure_lines(source, plan.anchor_line, max(plan.anchor_line, last), metrics)
    else:
        # absent or unreadable source: treat every covered line as empty
        extents = [
            LineExtent(line=n, visual_columns=0)
            for n in range(plan.anchor_line, plan.last_line + 1)
        ]
    geom = compute_geometry(plan, extents, metrics, config.margin)
    return render_svg(plan, geom, config.palette).text


def cmd_check(config: Config) -> int:
    report = run_build(config.workspace)
    loader = _source_loader(Path(report.workspace))
    plans, skipped = interpret_all(report, loader, registry=config.registry())

    written: list[Path] = []
    by_file: dict[str, list[VisualizationPlan]] = {}
    for plan in plans:
        by_file.setdefault(plan.file, []).append(plan)
    if plans:
        config.output_dir.mkdir(parents=True, exist_ok=True)
    for file, file_plans in sorted(by_file.items()):
        stem = Path(file).stem
        source = loader(file) or ""
        for plan in file_plans:
            svg_path = config.output_dir / f"{stem}-{plan.code}-L{plan.anchor_line}.svg"
            svg_path.write_text(_plan_svg(plan, source, config))
            written.append(svg_path)
        html_path = config.output_dir / f"{stem}.html"
        html_path.write_text(
            render_html_report(source, file_plans, config.metrics, config.margin, config.palette,
                               title=file)
        )
        written.append(html_path)

    print(f"build {'succeeded' if report.success else 'failed'}: "
          f"{len(plans)} plan(s), {len(skipped)} diagnostic(s) skipped")
    for path in written:
        print(f"  wrote {path}")
    for skip in skipped:
        print(f"  skipped {skip.code or 'N/A'}: {skip.kind} {skip.detail}".rstrip())
    return EXIT_CLEAN if report.success else EXIT_ERRORS


def cmd_plan(config: Config, file: str) -> int:
    report = run_build(config.workspace)
    loader = _source_loader(Path(report.workspace))
    plans, skipped = interpret_all(report, loader, registry=config.registry())

    wanted = (Path(report.workspace) / file).resolve()

    def matches(plan_file: str) -> bool:
        p = Path(plan_file)
        if not p.is_absolute():
            p = Path(report.workspace) / p
        return p.resolve() == wanted

    payload = {
        "file": file,
        "plans": [
            {**plan.to_dict(), "svg": _plan_svg(plan, loader(plan.file), config)}
            for plan in plans
            if matches(plan.file)
        ],
        "skipped": [
            {"code": s.code, "kind": s.kind, "detail": s.detail} for s in skipped
        ],
    }
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    print(f"{len(payload['plans'])} plan(s) for {file}", file=sys.stderr)
    return EXIT_CLEAN if report.success else EXIT_ERRORS


def cmd_record(config: Config) -> int:
    snapshot = telemetry.record_build(config.workspace, config.ledger_path)
    print(
        f"recorded build #{snapshot.seq}: "
        f"{'success' if snapshot.success else 'failure'}, "
        f"{len(snapshot.errors)} error fingerprint(s)"
    )
    return EXIT_CLEAN


def cmd_analyze(config: Config, out: Path | None, sqlite_path: Path | None) -> int:
    snapshots = telemetry.read_ledger(config.ledger_path)
    sessions, unresolved = telemetry.analyze_ledger(snapshots, config.cap_seconds)
    lines = [
        json.dumps(
            {
                "code": s.fingerprint.code,
                "file": s.fingerprint.file,
                "key": s.fingerprint.key,
                "first_build": s.first_build,
                "resolved_build": s.resolved_build,
                "arc_seconds": s.arc_seconds,
            },
            sort_keys=True,
        )
        for s in sessions
    ]
    text = "".join(line + "\n" for line in lines)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    for fp in unresolved:
        print(f"unresolved at end of ledger: {fp.code} {fp.file} {fp.key}", file=sys.stderr)
    if sqlite_path is not None:
        telemetry.compile_sqlite(snapshots, sqlite_path, config.cap_seconds)
        print(f"compiled {sqlite_path}", file=sys.stderr)
    return EXIT_CLEAN


def cmd_report(config: Config, fmt: str, out: Path | None) -> int:
    snapshots = telemetry.read_ledger(config.ledger_path)
    sessions, _unresolved = telemetry.analyze_ledger(snapshots, config.cap_seconds)
    rows = telemetry.aggregate(sessions)
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_table(rows)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        cost_path = out / ("costs.csv" if fmt == "csv" else "costs.txt")
        cost_path.write_text(text)
        (out / "arc_by_session.csv").write_text(sessions_to_csv(sessions))
        render_violin(sessions, out / "arc_violin.png")
        print(f"wrote {cost_path}, {out / 'arc_by_session.csv'}, {out / 'arc_violin.png'}")
    else:
        sys.stdout.write(text)
    return EXIT_CLEAN


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="borrowviz",
        description="Visualize lifetime-related Rust compiler errors and mine "
        "error-resolution cost from build snapshots.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with default values for any flag")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", type=Path, default=None, help="project directory to build")
    common.add_argument("--out", type=Path, default=None, help="output directory or file")
    common.add_argument("--ledger", type=Path, default=None,
                        help=f"snapshot ledger path (default ${LEDGER_ENV_VAR})")
    common.add_argument("--font-size", type=float, default=None)
    common.add_argument("--line-height", type=float, default=None)
    common.add_argument("--char-width", type=float, default=None)
    common.add_argument("--tab-width", type=int, default=None)
    common.add_argument("--margin", type=float, default=None)
    common.add_argument("--cap-seconds", type=float, default=None)
    common.add_argument("--codes", type=str, default=None,
                        help="comma-separated registry override, e.g. E0382,E0597")
    common.add_argument("--error-color", type=str, default=None)
    common.add_argument("--info-color", type=str, default=None)
    common.add_argument("--info-color-2", type=str, default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common],
                   help="build, then write one SVG per plan and an HTML report per file")
    p_plan = sub.add_parser("plan", parents=[common],
                            help="emit plans for one file as JSON on stdout")
    p_plan.add_argument("file", help="source file, relative to the workspace")
    p_plan.add_argument("--format", choices=["json"], default="json")
    sub.add_parser("record", parents=[common], help="build once and append a snapshot to the ledger")
    p_an = sub.add_parser("analyze", parents=[common],
                          help="emit resolution sessions with their cost as JSONL")
    p_an.add_argument("--sqlite", type=Path, default=None,
                      help="also compile the ledger into this SQLite database")
    p_rep = sub.add_parser("report", parents=[common], help="aggregated cost table by error code")
    p_rep.add_argument("--format", choices=["csv", "table"], default="table")
    return parser


def _resolve_config(args: argparse.Namespace) -> Config:
    defaults: dict = {}
    if args.config is not None:
        defaults = json.loads(Path(args.config).read_text())

    def pick(flag: str, key: str, fallback):
        value = getattr(args, flag, None)
        if value is not None:
            return value
        return defaults.get(key, fallback)

    base = TextMetrics()
    metrics = TextMetrics(
        font_size=float(pick("font_size", "font_size", base.font_size)),
        line_height=float(pick("line_height", "line_height", base.line_height)),
        char_width=float(pick("char_width", "char_width", base.char_width)),
        tab_width=int(pick("tab_width", "tab_width", base.tab_width)),
    )
    palette = Palette(
        error=pick("error_color", "error_color", DEFAULT_PALETTE.error),
        info_primary=pick("info_color", "info_color", DEFAULT_PALETTE.info_primary),
        info_secondary=pick("info_color_2", "info_color_2", DEFAULT_PALETTE.info_secondary),
    )
    codes = pick("codes", "codes", None)
    if isinstance(codes, str):
        codes = [c.strip() for c in codes.split(",") if c.strip()]
    env_ledger = os.environ.get(LEDGER_ENV_VAR)
    ledger = pick("ledger", "ledger", Path(env_ledger) if env_ledger else Path("borrowviz-ledger.jsonl"))
    config = Config(
        workspace=Path(pick("workspace", "workspace", ".")).resolve(),
        output_dir=Path(pick("out", "out", "borrowviz-out")).resolve(),
        ledger_path=Path(ledger).resolve(),
        metrics=metrics,
        palette=palette,
        margin=float(pick("margin", "margin", 16.0)),
        cap_seconds=float(pick("cap_seconds", "cap_seconds", telemetry.DEFAULT_CAP_SECONDS)),
        codes=codes,
    )
    if config.cap_seconds <= 0:
        raise BorrowvizError("--cap-seconds must be positive")
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "check":
            return cmd_check(config)
        if args.command == "plan":
            return cmd_plan(config, args.file)
        if args.command == "record":
            return cmd_record(config)
        if args.command == "analyze":
            out = Path(args.out).resolve() if args.out else None
            return cmd_analyze(config, out, args.sqlite)
        if args.command == "report":
            out = Path(args.out).resolve() if args.out else None
            return cmd_report(config, args.format, out)
        raise BorrowvizError(f"unknown command {args.command}")  # unreachable
    except BorrowvizError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
