"""Build snapshots, resolution sessions, and per-error resolution cost.

Every recorded build appends one JSONL snapshot to an append-only ledger.
A resolution session is a maximal run of consecutive builds in which an
error fingerprint is present, closed by the first build where it is gone.
The session's cost is the sum of inter-build intervals (capped) divided by
the number of concurrent errors in each interval.
"""

from __future__ import annotations

import json
import re
import sqlite3
import statistics
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .diagnostics import BuildReport, Diagnostic, run_build
from .errors import EmptySession, LedgerWriteFailure, NegativeInterval, UnorderedInput

LEDGER_FORMAT_VERSION = 1
DEFAULT_CAP_SECONDS = 1500.0

_LINE_COL_REF = re.compile(r"\b\d+:\d+\b|\bline \d+\b")


@dataclass(frozen=True, order=True)
class ErrorFingerprint:
    code: str  # "N/A" for syntax errors
    file: str
    key: str  # span label + quoted identifiers, line numbers excluded


@dataclass(frozen=True)
class BuildSnapshot:
    seq: int
    timestamp: float
    errors: frozenset[ErrorFingerprint]
    success: bool

    def to_dict(self) -> dict:
        return {
            "v": LEDGER_FORMAT_VERSION,
            "seq": self.seq,
            "timestamp": self.timestamp,
            "success": self.success,
            "errors": [
                {"code": f.code, "file": f.file, "key": f.key}
                for f in sorted(self.errors)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BuildSnapshot":
        return cls(
            seq=d["seq"],
            timestamp=d["timestamp"],
            success=d["success"],
            errors=frozenset(
                ErrorFingerprint(code=e["code"], file=e["file"], key=e["key"])
                for e in d["errors"]
            ),
        )


@dataclass(frozen=True)
class ResolutionSession:
    fingerprint: ErrorFingerprint
    first_build: int  # seq where the error first appears
    resolved_build: int  # seq of the first build where it is gone
    arc_seconds: float = 0.0


@dataclass(frozen=True)
class CostRow:
    code: str
    description: str
    session_count: int
    total_share: float
    avg_seconds: float
    stddev_seconds: float


def fingerprint(diag: Diagnostic) -> ErrorFingerprint:
    """Identity of an error across builds.

    Line and column references are stripped so pure line-shift edits of
    unrelated code do not split a session. Two textually identical errors
    in one file collapse onto one fingerprint.
    """
    span = diag.primary_span()
    label = (span.label or "") if span is not None else ""
    identifiers = re.findall(r"`([^`]*)`", diag.message)
    key = _LINE_COL_REF.sub("", label) + "|" + ",".join(identifiers)
    return ErrorFingerprint(
        code=diag.code or "N/A",
        file=span.file if span is not None else "",
        key=key,
    )


def snapshot_from_report(report: BuildReport, seq: int) -> BuildSnapshot:
    errors = frozenset(
        fingerprint(d)
        for d in report.errors()
        if d.spans or d.code is not None  # drop span-less summary records
    )
    return BuildSnapshot(
        seq=seq, timestamp=report.timestamp, errors=errors, success=report.success
    )


def read_ledger(ledger: str | Path, warn=None) -> list[BuildSnapshot]:
    """Read a JSONL ledger, skipping a torn or foreign trailing line."""
    path = Path(ledger)
    if not path.exists():
        return []
    snapshots: list[BuildSnapshot] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            snapshots.append(BuildSnapshot.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError):
            message = f"ledger line {lineno} is unreadable; skipped"
            (warn or (lambda m: print(m, file=sys.stderr)))(message)
    return snapshots


def append_snapshot(ledger: str | Path, snapshot: BuildSnapshot) -> None:
    path = Path(ledger)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a") as fh:
            fh.write(json.dumps(snapshot.to_dict(), sort_keys=True) + "\n")
    except OSError as e:
        raise LedgerWriteFailure(str(e)) from e


def record_build(workspace: str | Path, ledger: str | Path) -> BuildSnapshot:
    """Build the workspace and append one snapshot to the ledger."""
    existing = read_ledger(ledger, warn=lambda m: None)
    next_seq = existing[-1].seq + 1 if existing else 1
    report = run_build(workspace)
    timestamp = report.timestamp
    if existing and timestamp < existing[-1].timestamp:
        timestamp = existing[-1].timestamp  # keep ledger timestamps non-decreasing
        report = replace(report, timestamp=timestamp)
    snapshot = snapshot_from_report(report, next_seq)
    append_snapshot(ledger, snapshot)
    return snapshot


def capped_interval(
    t_earlier: float, t_later: float, cap: float = DEFAULT_CAP_SECONDS
) -> float:
    """Inter-build interval, capped to absorb breaks."""
    if t_later < t_earlier:
        raise NegativeInterval(f"{t_later} < {t_earlier}")
    return min(t_later - t_earlier, cap)


def _check_order(snapshots: list[BuildSnapshot]) -> None:
    for prev, cur in zip(snapshots, snapshots[1:]):
        if cur.seq <= prev.seq:
            raise UnorderedInput(f"seq {cur.seq} after {prev.seq}")
        if cur.timestamp < prev.timestamp:
            raise UnorderedInput(f"timestamp decreases at seq {cur.seq}")


def detect_sessions(
    snapshots: list[BuildSnapshot],
) -> tuple[list[ResolutionSession], list[ErrorFingerprint]]:
    """Resolution sessions plus fingerprints still unresolved at the end.

    A session covers a maximal run of consecutive builds containing the
    fingerprint and is closed by the first later build where it is absent.
    arc_seconds is left at 0; use compute_arc to fill it.
    """
    _check_order(snapshots)
    sessions: list[ResolutionSession] = []
    open_since: dict[ErrorFingerprint, int] = {}
    for snap in snapshots:
        for fp, first_seq in list(open_since.items()):
            if fp not in snap.errors:
                sessions.append(
                    ResolutionSession(fingerprint=fp, first_build=first_seq, resolved_build=snap.seq)
                )
                del open_since[fp]
        for fp in snap.errors:
            open_since.setdefault(fp, snap.seq)
    sessions.sort(key=lambda s: (s.first_build, s.fingerprint))
    unresolved = sorted(open_since)
    return sessions, unresolved


def compute_arc(
    session: ResolutionSession,
    snapshots: list[BuildSnapshot],
    cap: float = DEFAULT_CAP_SECONDS,
) -> float:
    """Active Resolution Cost: capped intervals shared among concurrent errors."""
    by_seq = {s.seq: i for i, s in enumerate(snapshots)}
    if session.first_build not in by_seq or session.resolved_build not in by_seq:
        raise EmptySession("session builds not present in the given snapshots")
    start = by_seq[session.first_build]
    end = by_seq[session.resolved_build]
    if end <= start:
        raise EmptySession("session resolves at or before its first build")
    total = 0.0
    for i in range(start, end):
        concurrent = len(snapshots[i].errors)
        if concurrent == 0:
            raise EmptySession(f"build seq {snapshots[i].seq} inside session has no errors")
        gap = capped_interval(snapshots[i].timestamp, snapshots[i + 1].timestamp, cap)
        total += gap / concurrent
    return total


def analyze_ledger(
    snapshots: list[BuildSnapshot], cap: float = DEFAULT_CAP_SECONDS
) -> tuple[list[ResolutionSession], list[ErrorFingerprint]]:
    """Sessions with their ARC filled in, plus unresolved fingerprints."""
    sessions, unresolved = detect_sessions(snapshots)
    return (
        [replace(s, arc_seconds=compute_arc(s, snapshots, cap)) for s in sessions],
        unresolved,
    )


# Short descriptions for codes likely to appear in reports.
CODE_DESCRIPTIONS = {
    "N/A": "Syntax error",
    "E0004": "Match is missing some patterns",
    "E0061": "Wrong number of arguments for a function call",
    "E0063": "Struct literal is missing a field",
    "E0277": "Type does not implement a required trait",
    "E0308": "Mismatched types",
    "E0373": "Closure may outlive the variable it borrows",
    "E0382": "Variable used after its contents were moved",
    "E0425": "Unresolved name",
    "E0433": "Unresolved crate, module, or type",
    "E0499": "Second mutable borrow while the first is live",
    "E0502": "Mutable and immutable borrows overlap",
    "E0503": "Variable used while mutably borrowed",
    "E0505": "Variable moved while borrowed",
    "E0506": "Assignment to a borrowed variable",
    "E0507": "Move out of a borrowed value",
    "E0596": "Mutable borrow of an immutable binding",
    "E0597": "Value dropped while still borrowed",
    "E0599": "Method not found for this type",
}


def aggregate(sessions: list[ResolutionSession]) -> list[CostRow]:
    """Per-code cost rows, sorted by total cost descending."""
    by_code: dict[str, list[float]] = {}
    for session in sessions:
        by_code.setdefault(session.fingerprint.code, []).append(session.arc_seconds)
    grand_total = sum(arc for arcs in by_code.values() for arc in arcs)
    rows = [
        CostRow(
            code=code,
            description=CODE_DESCRIPTIONS.get(code, ""),
            session_count=len(arcs),
            total_share=(sum(arcs) / grand_total) if grand_total > 0 else 0.0,
            avg_seconds=statistics.fmean(arcs),
            stddev_seconds=statistics.pstdev(arcs),
        )
        for code, arcs in by_code.items()
    ]
    rows.sort(key=lambda r: (-r.total_share, r.code))
    return rows


def compile_sqlite(snapshots: list[BuildSnapshot], db_path: str | Path,
                   cap: float = DEFAULT_CAP_SECONDS) -> None:
    """Compile a ledger into an SQLite database for ad-hoc queries.

    The JSONL ledger stays the source of truth; the database is derived.
    """
    sessions, unresolved = analyze_ledger(snapshots, cap)
    rows = aggregate(sessions)
    con = sqlite3.connect(db_path)
    try:
        con.executescript(
            """
            DROP TABLE IF EXISTS snapshots;
            DROP TABLE IF EXISTS snapshot_errors;
            DROP TABLE IF EXISTS sessions;
            DROP TABLE IF EXISTS cost_rows;
            CREATE TABLE snapshots (seq INTEGER PRIMARY KEY, timestamp REAL, success INTEGER);
            CREATE TABLE snapshot_errors (
                seq INTEGER, code TEXT, file TEXT, key TEXT,
                FOREIGN KEY (seq) REFERENCES snapshots (seq));
            CREATE TABLE sessions (
                code TEXT, file TEXT, key TEXT,
                first_build INTEGER, resolved_build INTEGER, arc_seconds REAL);
            CREATE TABLE cost_rows (
                code TEXT, description TEXT, session_count INTEGER,
                total_share REAL, avg_seconds REAL, stddev_seconds REAL);
            """
        )
        con.executemany(
            "INSERT INTO snapshots VALUES (?, ?, ?)",
            [(s.seq, s.timestamp, int(s.success)) for s in snapshots],
        )
        con.executemany(
            "INSERT INTO snapshot_errors VALUES (?, ?, ?, ?)",
            [(s.seq, f.code, f.file, f.key) for s in snapshots for f in sorted(s.errors)],
        )
        con.executemany(
            "INSERT INTO sessions VALUES (?, ?, ?, ?, ?, ?)",
            [
                (s.fingerprint.code, s.fingerprint.file, s.fingerprint.key,
                 s.first_build, s.resolved_build, s.arc_seconds)
                for s in sessions
            ],
        )
        con.executemany(
            "INSERT INTO cost_rows VALUES (?, ?, ?, ?, ?, ?)",
            [
                (r.code, r.description, r.session_count, r.total_share,
                 r.avg_seconds, r.stddev_seconds)
                for r in rows
            ],
        )
        con.commit()
    finally:
        con.close()
