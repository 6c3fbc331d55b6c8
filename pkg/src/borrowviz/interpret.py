"""Turn a supported borrow-checker diagnostic into diagram content.

Each supported error code has one rule. Rules read the diagnostic's labeled
spans (preferred, machine-readable) and fall back on the message text only
to pull out the variable name. Lifetime intervals become regions, single
events (move, borrow, use, drop) become arrows, and every plan ends with a
short tip explaining the cause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .diagnostics import BuildReport, Diagnostic, SourceSpan
from .errors import PatternMismatch, UnsupportedCode


class Severity2(str, Enum):
    ERROR = "error"
    INFORMATION = "information"


@dataclass(frozen=True)
class Region:
    start_line: int
    end_line: int
    label: str
    severity: Severity2
    open_start: bool = False
    open_end: bool = False

    def __post_init__(self):
        if self.start_line > self.end_line:
            raise ValueError(f"region ends before it starts: {self.start_line}..{self.end_line}")
        if self.open_start and self.open_end:
            raise ValueError("an open region has exactly one open end")


@dataclass(frozen=True)
class TailAnchor:
    """Where an arrow's tail starts: the line's own center, or a region end."""

    kind: str  # "line_center" | "region_end"
    region_index: int | None = None
    region_which: str | None = None  # "start" | "end"

    LINE_CENTER: "TailAnchor" = None  # set below

    @classmethod
    def region_end(cls, index: int, which: str) -> "TailAnchor":
        return cls(kind="region_end", region_index=index, region_which=which)


TailAnchor.LINE_CENTER = TailAnchor(kind="line_center")


@dataclass(frozen=True)
class Arrow:
    line: int
    label: str
    severity: Severity2
    tail_anchor: TailAnchor = TailAnchor.LINE_CENTER


@dataclass(frozen=True)
class Tip:
    lines: tuple[str, ...]

    def __post_init__(self):
        if not self.lines:
            raise ValueError("tip must have at least one line")


@dataclass(frozen=True)
class VisualizationPlan:
    code: str
    file: str
    regions: tuple[Region, ...]
    arrows: tuple[Arrow, ...]
    tip: Tip

    @property
    def anchor_line(self) -> int:
        return min(
            [r.start_line for r in self.regions] + [a.line for a in self.arrows]
        )

    @property
    def last_line(self) -> int:
        return max([r.end_line for r in self.regions] + [a.line for a in self.arrows])

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "file": self.file,
            "anchor_line": self.anchor_line,
            "regions": [
                {
                    "start_line": r.start_line,
                    "end_line": r.end_line,
                    "open_start": r.open_start,
                    "open_end": r.open_end,
                    "label": r.label,
                    "severity": r.severity.value,
                }
                for r in self.regions
            ],
            "arrows": [
                {
                    "line": a.line,
                    "label": a.label,
                    "severity": a.severity.value,
                    "tail_anchor": {
                        "kind": a.tail_anchor.kind,
                        "region_index": a.tail_anchor.region_index,
                        "region_which": a.tail_anchor.region_which,
                    },
                }
                for a in self.arrows
            ],
            "tip": list(self.tip.lines),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VisualizationPlan":
        return cls(
            code=d["code"],
            file=d["file"],
            regions=tuple(
                Region(
                    start_line=r["start_line"],
                    end_line=r["end_line"],
                    open_start=r["open_start"],
                    open_end=r["open_end"],
                    label=r["label"],
                    severity=Severity2(r["severity"]),
                )
                for r in d["regions"]
            ),
            arrows=tuple(
                Arrow(
                    line=a["line"],
                    label=a["label"],
                    severity=Severity2(a["severity"]),
                    tail_anchor=TailAnchor(
                        kind=a["tail_anchor"]["kind"],
                        region_index=a["tail_anchor"]["region_index"],
                        region_which=a["tail_anchor"]["region_which"],
                    ),
                )
                for a in d["arrows"]
            ),
            tip=Tip(lines=tuple(d["tip"])),
        )


def validate_plan(plan: VisualizationPlan, source_line_count: int | None = None) -> None:
    """Check structural invariants; raises ValueError on violation."""
    if not plan.regions and not plan.arrows:
        raise ValueError("plan has no components")
    severities = [r.severity for r in plan.regions] + [a.severity for a in plan.arrows]
    if Severity2.ERROR not in severities:
        raise ValueError("plan has no error-severity component")
    for arrow in plan.arrows:
        anchor = arrow.tail_anchor
        if anchor.kind == "region_end":
            if not (0 <= anchor.region_index < len(plan.regions)):
                raise ValueError(f"arrow tail references missing region {anchor.region_index}")
            region = plan.regions[anchor.region_index]
            is_open = region.open_start if anchor.region_which == "start" else region.open_end
            if is_open:
                raise ValueError("arrow tail anchored at an open region end")
    if source_line_count is not None:
        for line in [r.start_line for r in plan.regions] + [r.end_line for r in plan.regions] + [
            a.line for a in plan.arrows
        ]:
            if not (1 <= line <= source_line_count):
                raise ValueError(f"component line {line} outside file of {source_line_count} lines")


# --- span matching helpers ---

_BACKTICKED = re.compile(r"`([^`]+)`")


def _variable_name(diag: Diagnostic) -> str:
    m = _BACKTICKED.search(diag.message)
    return m.group(1) if m else "value"


def _find_span(
    diag: Diagnostic, label_pattern: str, primary: bool | None = None
) -> SourceSpan | None:
    rx = re.compile(label_pattern)
    for span in diag.spans:
        if primary is not None and span.is_primary != primary:
            continue
        if span.label and rx.search(span.label):
            return span
    return None


def _require_span(
    diag: Diagnostic, label_pattern: str, what: str, primary: bool | None = None
) -> SourceSpan:
    span = _find_span(diag, label_pattern, primary=primary)
    if span is None:
        raise PatternMismatch(diag.code or "?", f"missing span: {what}", diag.message)
    return span


def _primary_span(diag: Diagnostic) -> SourceSpan:
    span = diag.primary_span()
    if span is None:
        raise PatternMismatch(diag.code or "?", "diagnostic has no spans", diag.message)
    return span


def function_end_line(source: str, inner_line: int) -> int:
    """Last line of the function enclosing inner_line, by brace matching.

    Falls back to the file's last line when no enclosing fn is found.
    """
    lines = source.splitlines()
    fn_rx = re.compile(r"\bfn\s+\w+")
    for idx in range(min(inner_line, len(lines)) - 1, -1, -1):
        if fn_rx.search(lines[idx]):
            depth = 0
            seen_open = False
            for j in range(idx, len(lines)):
                for ch in lines[j]:
                    if ch == "{":
                        depth += 1
                        seen_open = True
                    elif ch == "}":
                        depth -= 1
                        if seen_open and depth == 0:
                            return j + 1
            break
    return max(len(lines), inner_line)


# --- per-code interpretation rules ---

def _rule_e0382(diag: Diagnostic, source: str) -> VisualizationPlan:
    var = _variable_name(diag)
    binding = _require_span(diag, r"^move occurs because", "binding of the moved value")
    moved = _require_span(diag, r"^value moved", "move site")
    use = _primary_span(diag)
    region = Region(
        start_line=binding.start.line,
        end_line=moved.start.line,
        label=f"lifetime of `{var}`",
        severity=Severity2.INFORMATION,
    )
    return VisualizationPlan(
        code=diag.code,
        file=use.file,
        regions=(region,),
        arrows=(
            Arrow(
                line=moved.start.line,
                label=f"`{var}` moved to another variable",
                severity=Severity2.INFORMATION,
                tail_anchor=TailAnchor.region_end(0, "end"),
            ),
            Arrow(
                line=use.start.line,
                label=f"use of moved `{var}`",
                severity=Severity2.ERROR,
            ),
        ),
        tip=Tip(
            lines=(
                f"`{var}` was moved on line {moved.start.line}, which ended its lifetime.",
                f"The use on line {use.start.line} happens after the move, so it is an error.",
                f"Clone `{var}` before the move, or pass a reference instead.",
            )
        ),
    )


def _rule_e0373(diag: Diagnostic, source: str) -> VisualizationPlan:
    var = _variable_name(diag)
    closure = _primary_span(diag)
    borrowed = _find_span(diag, r"borrowed here$", primary=False)
    fn_end = function_end_line(source, closure.start.line)
    region = Region(
        start_line=closure.start.line,
        end_line=max(fn_end, closure.start.line),
        open_end=True,
        label=f"the closure borrowing `{var}` may outlive the function",
        severity=Severity2.ERROR,
    )
    arrows = []
    if borrowed is not None:
        arrows.append(
            Arrow(
                line=borrowed.start.line,
                label=f"`{var}` is borrowed here",
                severity=Severity2.INFORMATION,
            )
        )
    return VisualizationPlan(
        code=diag.code,
        file=closure.file,
        regions=(region,),
        arrows=tuple(arrows),
        tip=Tip(
            lines=(
                f"The closure borrows `{var}`, which only lives until the function returns.",
                "The closure escapes the function, so the borrow would outlive its value.",
                f"Use the `move` keyword to make the closure take ownership of `{var}`.",
            )
        ),
    )


def _rule_e0597(diag: Diagnostic, source: str) -> VisualizationPlan:
    var = _variable_name(diag)
    borrow = _primary_span(diag)
    dropped = _require_span(diag, r"dropped here while still borrowed", "drop site")
    binding = _find_span(diag, r"^binding .* declared here", primary=False)
    later = _find_span(diag, r"borrow later used here", primary=False)
    start_line = binding.start.line if binding is not None else borrow.start.line
    region = Region(
        start_line=min(start_line, dropped.start.line),
        end_line=dropped.start.line,
        label=f"lifetime of `{var}`",
        severity=Severity2.INFORMATION,
    )
    arrows = [
        Arrow(
            line=borrow.start.line,
            label=f"`{var}` is borrowed here",
            severity=Severity2.INFORMATION,
        )
    ]
    if later is not None:
        arrows.append(
            Arrow(
                line=later.start.line,
                label=f"borrow used here, after `{var}` was dropped",
                severity=Severity2.ERROR,
            )
        )
    else:
        arrows.append(
            Arrow(
                line=dropped.start.line,
                label=f"`{var}` dropped here while still borrowed",
                severity=Severity2.ERROR,
                tail_anchor=TailAnchor.region_end(0, "end"),
            )
        )
    return VisualizationPlan(
        code=diag.code,
        file=borrow.file,
        regions=(region,),
        arrows=tuple(arrows),
        tip=Tip(
            lines=(
                f"`{var}` is dropped at the end of its scope, on line {dropped.start.line},",
                "but a borrow of it is still in use after that point.",
                f"Move `{var}` to an enclosing scope so it outlives the borrow.",
            )
        ),
    )


_BORROW_CONFLICT_TIPS: dict[str, tuple[str, ...]] = {
    "E0499": (
        "`{var}` cannot be mutably borrowed twice at the same time.",
        "The first mutable borrow lasts until its final use; the second overlaps it.",
        "Reorder the code so one borrow ends before the next begins.",
    ),
    "E0502": (
        "`{var}` cannot be borrowed mutably and immutably at the same time.",
        "The earlier borrow lasts until its final use; the conflicting borrow overlaps it.",
        "Reorder the code so one borrow ends before the other begins.",
    ),
    "E0503": (
        "`{var}` cannot be used while it is mutably borrowed.",
        "The mutable borrow lasts until its final use; the use overlaps it.",
        "Move the use before the borrow, or after the borrow's last use.",
    ),
    "E0505": (
        "`{var}` cannot be moved while it is borrowed.",
        "The borrow lasts until its final use; the move would invalidate it.",
        "Move `{var}` after the borrow's last use, or clone it.",
    ),
    "E0506": (
        "`{var}` cannot be assigned while it is borrowed.",
        "The borrow lasts until its final use; assigning would invalidate it.",
        "Assign after the borrow's last use.",
    ),
}


def _rule_borrow_conflict(diag: Diagnostic, source: str) -> VisualizationPlan:
    var = _variable_name(diag)
    conflict = _primary_span(diag)
    prior = _find_span(diag, r"borrow(?:ed here| of .* occurs here| occurs here)$", primary=False)
    if prior is None:
        raise PatternMismatch(diag.code or "?", "missing span: prior borrow", diag.message)
    later = _find_span(diag, r"later used here", primary=False)
    end_line = later.start.line if later is not None else conflict.start.line
    region = Region(
        start_line=min(prior.start.line, end_line),
        end_line=max(prior.start.line, end_line),
        label=prior.label or f"borrow of `{var}`",
        severity=Severity2.INFORMATION,
    )
    tip_template = _BORROW_CONFLICT_TIPS[diag.code]
    return VisualizationPlan(
        code=diag.code,
        file=conflict.file,
        regions=(region,),
        arrows=(
            Arrow(
                line=conflict.start.line,
                label=conflict.label or diag.message,
                severity=Severity2.ERROR,
            ),
        ),
        tip=Tip(lines=tuple(t.format(var=var) for t in tip_template)),
    )


InterpretationRule = Callable[[Diagnostic, str], VisualizationPlan]

DEFAULT_REGISTRY: dict[str, InterpretationRule] = {
    "E0382": _rule_e0382,
    "E0373": _rule_e0373,
    "E0499": _rule_borrow_conflict,
    "E0502": _rule_borrow_conflict,
    "E0503": _rule_borrow_conflict,
    "E0505": _rule_borrow_conflict,
    "E0506": _rule_borrow_conflict,
    "E0597": _rule_e0597,
}


def interpret(
    diag: Diagnostic,
    source: str,
    registry: dict[str, InterpretationRule] | None = None,
) -> VisualizationPlan:
    """Build the diagram plan for one supported diagnostic.

    Raises UnsupportedCode when the code has no rule, PatternMismatch when
    the diagnostic does not have the shape the rule expects.
    """
    rules = DEFAULT_REGISTRY if registry is None else registry
    if diag.code is None or diag.code not in rules:
        raise UnsupportedCode(diag.code)
    plan = rules[diag.code](diag, source)
    line_count = len(source.splitlines()) if source else None
    validate_plan(plan, source_line_count=line_count)
    return plan


@dataclass(frozen=True)
class SkippedDiagnostic:
    code: str | None
    kind: str  # "unsupported_code" | "pattern_mismatch" | "source_unavailable"
    detail: str = ""


def interpret_all(
    report: BuildReport,
    load_source: Callable[[str], str | None],
    registry: dict[str, InterpretationRule] | None = None,
) -> tuple[list[VisualizationPlan], list[SkippedDiagnostic]]:
    """One plan per supported error diagnostic; failures are collected.

    load_source maps a span's file path (as reported by the compiler) to the
    file's text, or None when unavailable.
    """
    plans: list[VisualizationPlan] = []
    skipped: list[SkippedDiagnostic] = []
    for diag in report.diagnostics:
        if diag.severity != "error":
            continue
        if diag.code is None:
            if diag.spans:  # syntax error; kept for telemetry, never visualized
                skipped.append(
                    SkippedDiagnostic(code=None, kind="unsupported_code", detail=diag.message)
                )
            continue  # span-less summaries like "aborting due to N errors"
        span = diag.primary_span()
        source = load_source(span.file) if span is not None else None
        try:
            plans.append(interpret(diag, source or "", registry=registry))
        except UnsupportedCode:
            skipped.append(
                SkippedDiagnostic(code=diag.code, kind="unsupported_code", detail=diag.message)
            )
        except PatternMismatch as e:
            skipped.append(
                SkippedDiagnostic(code=diag.code, kind="pattern_mismatch", detail=e.reason)
            )
    return plans, skipped
