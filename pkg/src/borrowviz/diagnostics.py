"""Run the Rust toolchain in JSON-diagnostics mode and structure its output.

Two stream shapes are accepted: raw ``rustc --error-format=json`` records
(one diagnostic object per line on stderr) and ``cargo build
--message-format=json`` records (diagnostics wrapped in
``{"reason": "compiler-message", "message": {...}}`` on stdout).
"""

from __future__ import annotations

import json
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import MalformedRecord, ToolchainMissing, WorkspaceNotFound

SEVERITIES = ("error", "warning", "note", "help")

# Levels rustc emits that we fold into the four we keep.
_LEVEL_ALIASES = {
    "error: internal compiler error": "error",
    "failure-note": "note",
    "warning": "warning",
    "error": "error",
    "note": "note",
    "help": "help",
}


@dataclass(frozen=True, order=True)
class SourcePosition:
    line: int  # 1-based
    column: int  # 1-based

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"positions are 1-based, got {self.line}:{self.column}")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: SourcePosition
    end: SourcePosition
    label: str | None = None
    is_primary: bool = False

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"span ends before it starts: {self.start} > {self.end}")


@dataclass(frozen=True)
class Diagnostic:
    code: str | None
    severity: str  # one of SEVERITIES
    message: str
    spans: tuple[SourceSpan, ...] = ()
    children: tuple["Diagnostic", ...] = ()
    rendered: str | None = None

    def primary_span(self) -> SourceSpan | None:
        for span in self.spans:
            if span.is_primary:
                return span
        return self.spans[0] if self.spans else None

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "spans": [
                {
                    "file": s.file,
                    "start": {"line": s.start.line, "column": s.start.column},
                    "end": {"line": s.end.line, "column": s.end.column},
                    "label": s.label,
                    "is_primary": s.is_primary,
                }
                for s in self.spans
            ],
            "children": [c.to_dict() for c in self.children],
            "rendered": self.rendered,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Diagnostic":
        return cls(
            code=d["code"],
            severity=d["severity"],
            message=d["message"],
            spans=tuple(
                SourceSpan(
                    file=s["file"],
                    start=SourcePosition(**s["start"]),
                    end=SourcePosition(**s["end"]),
                    label=s["label"],
                    is_primary=s["is_primary"],
                )
                for s in d["spans"]
            ),
            children=tuple(cls.from_dict(c) for c in d["children"]),
            rendered=d.get("rendered"),
        )


@dataclass(frozen=True)
class BuildReport:
    timestamp: float  # seconds since epoch, taken at invocation
    workspace: str
    success: bool
    diagnostics: tuple[Diagnostic, ...] = field(default_factory=tuple)

    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")


def _span_from_json(raw: dict) -> SourceSpan:
    return SourceSpan(
        file=raw["file_name"],
        start=SourcePosition(line=raw["line_start"], column=raw["column_start"]),
        end=SourcePosition(line=raw["line_end"], column=raw["column_end"]),
        label=raw.get("label"),
        is_primary=bool(raw.get("is_primary")),
    )


def _diagnostic_from_json(raw: dict) -> Diagnostic:
    code = raw.get("code")
    level = _LEVEL_ALIASES.get(raw.get("level", ""), "note")
    return Diagnostic(
        code=code.get("code") if isinstance(code, dict) else code,
        severity=level,
        message=raw["message"],
        spans=tuple(_span_from_json(s) for s in raw.get("spans", ())),
        children=tuple(_diagnostic_from_json(c) for c in raw.get("children", ())),
        rendered=raw.get("rendered"),
    )


def _looks_like_diagnostic(record: dict) -> bool:
    if record.get("$message_type") == "diagnostic":
        return True
    # Older toolchains omit $message_type; fall back on shape.
    return "message" in record and "level" in record and "spans" in record


def parse_diagnostic_stream(stream: str | Iterable[str]) -> list[Diagnostic]:
    """Parse newline-delimited JSON diagnostics into Diagnostic records.

    Non-diagnostic records (artifact notices, build-script output, plain
    text) are skipped. Raises MalformedRecord when a record claims to be a
    diagnostic but lacks its message or spans.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = list(stream)
    out: list[Diagnostic] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or not line.startswith("{"):
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            continue
        if not isinstance(record, dict):
            continue
        if record.get("reason") == "compiler-message":
            record = record.get("message")
            if not isinstance(record, dict):
                raise MalformedRecord(lineno, "compiler-message without a message object")
        elif record.get("reason") is not None:
            continue  # other cargo record kinds
        if not _looks_like_diagnostic(record):
            continue
        if "message" not in record or "spans" not in record:
            raise MalformedRecord(lineno, "diagnostic record missing message or spans")
        out.append(_diagnostic_from_json(record))
    return out


def filter_supported(diags: list[Diagnostic], registry: Iterable[str]) -> list[Diagnostic]:
    """Keep only diagnostics whose code is in the registry, preserving order."""
    codes = set(registry)
    return [d for d in diags if d.code in codes]


_build_locks: dict[str, threading.Lock] = {}
_build_locks_guard = threading.Lock()


def _workspace_lock(workspace: str) -> threading.Lock:
    with _build_locks_guard:
        return _build_locks.setdefault(workspace, threading.Lock())


def _find_entry_file(workspace: Path) -> Path | None:
    for name in ("main.rs", "lib.rs"):
        candidate = workspace / name
        if candidate.is_file():
            return candidate
    rs_files = sorted(workspace.glob("*.rs"))
    return rs_files[0] if len(rs_files) == 1 else None


def run_build(workspace: str | Path, timeout: float = 120.0) -> BuildReport:
    """Build the workspace with JSON diagnostics and return a BuildReport.

    A workspace with a Cargo.toml is built with cargo; otherwise a single
    .rs entry file is checked directly with rustc (no codegen). Builds of
    the same workspace are serialized.
    """
    ws = Path(workspace).resolve()
    if not ws.is_dir():
        raise WorkspaceNotFound(str(workspace))

    scratch: tempfile.TemporaryDirectory | None = None
    if (ws / "Cargo.toml").is_file():
        cmd = ["cargo", "build", "--message-format=json", "--quiet"]
        diagnostics_from = "stdout"
    else:
        entry = _find_entry_file(ws)
        if entry is None:
            raise WorkspaceNotFound(f"no Cargo.toml or .rs entry file in {ws}")
        scratch = tempfile.TemporaryDirectory(prefix="borrowviz-build-")
        cmd = [
            "rustc",
            "--edition",
            "2021",
            "--error-format=json",
            "--emit=metadata",
            "--out-dir",
            scratch.name,
            entry.name,
        ]
        diagnostics_from = "stderr"

    timestamp = time.time()
    try:
        with _workspace_lock(str(ws)):
            try:
                proc = subprocess.run(
                    cmd, cwd=ws, capture_output=True, text=True, timeout=timeout
                )
            except FileNotFoundError as e:
                raise ToolchainMissing(f"{cmd[0]} not found on PATH") from e
    finally:
        if scratch is not None:
            scratch.cleanup()
    raw = proc.stdout if diagnostics_from == "stdout" else proc.stderr
    diagnostics = parse_diagnostic_stream(raw)
    return BuildReport(
        timestamp=timestamp,
        workspace=str(ws),
        success=proc.returncode == 0,
        diagnostics=tuple(diagnostics),
    )
