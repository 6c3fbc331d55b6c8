"""Acceptance suite: one test (and one printed pass/fail line) per criterion."""

import json
import math
import random
import re
import time
import xml.etree.ElementTree as ET

from borrowviz import (
    BuildSnapshot,
    ErrorFingerprint,
    ResolutionSession,
    Severity2,
    TextMetrics,
    aggregate,
    capped_interval,
    compute_arc,
    compute_geometry,
    detect_sessions,
    interpret_all,
    measure_lines,
    render_svg,
    run_build,
)
from borrowviz.cli import main
from borrowviz.interpret import DEFAULT_REGISTRY, function_end_line

METRICS = TextMetrics()
MARGIN = 16.0


def _pass(name):
    print(f"ACCEPTANCE PASS: {name}")


def _plans(fixtures_root, name):
    workspace = fixtures_root / name
    report = run_build(workspace)
    return interpret_all(report, lambda f: (workspace / f).read_text())


def test_use_after_move_reproduction(fixtures_root):
    started = time.monotonic()
    plans, skipped = _plans(fixtures_root, "e0382")
    (plan,) = plans
    assert skipped == []
    assert plan.code == "E0382"
    (region,) = plan.regions
    assert (region.start_line, region.end_line) == (10, 12)
    assert not region.open_start and not region.open_end
    move, use = plan.arrows
    assert move.line == 12 and move.severity == Severity2.INFORMATION
    assert move.tail_anchor.kind == "region_end" and move.tail_anchor.region_index == 0
    assert use.line == 15 and use.severity == Severity2.ERROR
    assert len(plan.tip.lines) >= 1
    elapsed = time.monotonic() - started
    assert elapsed < 30, f"took {elapsed:.1f}s"
    _pass("Use-after-move diagram (E0382 structure, < 30 s including the build)")


def test_closure_escape_reproduction(fixtures_root):
    plans, skipped = _plans(fixtures_root, "e0373")
    (plan,) = plans
    assert skipped == []
    (region,) = plan.regions
    assert int(region.open_start) + int(region.open_end) == 1
    source = (fixtures_root / "e0373" / "main.rs").read_text()
    assert region.end_line == function_end_line(source, plan.anchor_line)
    assert region.open_end
    _pass("Closure-escape diagram (one open region end at the function's last line)")


def test_registry_coverage(fixtures_root):
    for code in sorted(DEFAULT_REGISTRY):
        plans, skipped = _plans(fixtures_root, code.lower())
        assert [p.code for p in plans] == [code], code
        assert not any(s.kind == "pattern_mismatch" for s in skipped), code
    for name, expect_codes in [("e0308", ["E0308"]), ("syntax", [None])]:
        plans, skipped = _plans(fixtures_root, name)
        assert plans == []
        assert [s.code for s in skipped] == expect_codes
        assert all(s.kind == "unsupported_code" for s in skipped)
    _pass("Registry coverage (8/8 codes visualized, unsupported fixtures skipped)")


def _random_ledger(rng):
    fps = [ErrorFingerprint(code=f"E{n:04d}", file="m.rs", key=str(n)) for n in range(5)]
    snaps = []
    t = 0.0
    for seq in range(1, rng.randint(1, 10) + 1):
        t += rng.uniform(1, 3000)
        present = frozenset(fp for fp in fps if rng.random() < 0.4)
        snaps.append(BuildSnapshot(seq=seq, timestamp=t, errors=present, success=not present))
    return snaps


def _oracle_sessions(snaps, cap=1500.0):
    out = []
    n = len(snaps)
    for fp in sorted({f for s in snaps for f in s.errors}):
        i = 0
        while i < n:
            if fp in snaps[i].errors:
                j = i
                while j < n and fp in snaps[j].errors:
                    j += 1
                if j < n:
                    arc = sum(
                        min(snaps[k + 1].timestamp - snaps[k].timestamp, cap)
                        / len(snaps[k].errors)
                        for k in range(i, j)
                    )
                    out.append((fp, snaps[i].seq, snaps[j].seq, arc))
                i = j
            else:
                i += 1
    return sorted(out, key=lambda s: (s[1], s[0]))


def test_arc_oracle():
    rng = random.Random(20230815)
    for _ in range(100):
        snaps = _random_ledger(rng)
        sessions, _ = detect_sessions(snaps)
        got = sorted(
            ((s.fingerprint, s.first_build, s.resolved_build, compute_arc(s, snaps))
             for s in sessions),
            key=lambda s: (s[1], s[0]),
        )
        expected = _oracle_sessions(snaps)
        assert [g[:3] for g in got] == [e[:3] for e in expected]
        for g, e in zip(got, expected):
            assert math.isclose(g[3], e[3], abs_tol=1e-9)
    # hand-derived three-build example
    a = ErrorFingerprint("A", "m.rs", "a")
    b = ErrorFingerprint("B", "m.rs", "b")
    snaps = [
        BuildSnapshot(1, 0.0, frozenset({a, b}), False),
        BuildSnapshot(2, 100.0, frozenset({b}), False),
        BuildSnapshot(3, 160.0, frozenset(), True),
    ]
    sessions, _ = detect_sessions(snaps)
    arcs = {s.fingerprint.code: compute_arc(s, snaps) for s in sessions}
    assert arcs == {"A": 50.0, "B": 110.0}
    _pass("ARC oracle (100 random ledgers within 1e-9; hand example exact)")


def test_cap_rule():
    rng = random.Random(42)
    checked = 0
    for _ in range(100):
        snaps = _random_ledger(rng)
        sessions, _ = detect_sessions(snaps)
        index = {s.seq: i for i, s in enumerate(snaps)}
        for session in sessions:
            contributions = []
            for i in range(index[session.first_build], index[session.resolved_build]):
                gap = snaps[i + 1].timestamp - snaps[i].timestamp
                share = capped_interval(snaps[i].timestamp, snaps[i + 1].timestamp) / len(snaps[i].errors)
                if gap >= 1500.0:
                    assert share == 1500.0 / len(snaps[i].errors)
                    checked += 1
                contributions.append(share)
            assert math.isclose(compute_arc(session, snaps), sum(contributions), abs_tol=1e-9)
    assert checked > 0
    _pass(f"Cap rule (gaps >= 1500 s contribute exactly 1500/|E_i|; {checked} cases)")


def _svg_coordinates(svg_text):
    root = ET.fromstring(svg_text)
    coords = [float(root.get("width")), float(root.get("height"))]
    for el in root.iter():
        for attr in ("x", "y", "x1", "y1", "x2", "y2"):
            if el.get(attr) is not None:
                coords.append(float(el.get(attr)))
        if el.get("d"):
            coords += [float(v) for v in re.findall(r"-?\d+(?:\.\d+)?(?:e-?\d+)?", el.get("d"))]
    return coords


def test_layout_properties(fixtures_root, manifest):
    checked_plans = 0
    for name in manifest["fixtures"]:
        if name == "cargo_clean":
            continue
        plans, _ = _plans(fixtures_root, name)
        source = (fixtures_root / name / "main.rs").read_text()
        for plan in plans:
            extents = measure_lines(source, plan.anchor_line, plan.last_line, METRICS)
            geom = compute_geometry(plan, extents, METRICS, MARGIN)
            widest = max(e.visual_columns for e in extents) * METRICS.char_width
            min_x = min(
                [r.x - r.cap_half_width for r in geom.regions]
                + [min(a.tail_x, a.head_x) for a in geom.arrows]
                + [t.x for t in geom.tip_lines]
            )
            assert min_x >= widest + MARGIN
            base = _svg_coordinates(render_svg(plan, geom).text)
            for s in (0.5, 2, 3):
                scaled_geom = compute_geometry(plan, extents, METRICS.scaled(s), MARGIN * s)
                scaled = _svg_coordinates(render_svg(plan, scaled_geom).text)
                assert len(base) == len(scaled)
                for x, y in zip(base, scaled):
                    assert y == x * s
            checked_plans += 1
    assert checked_plans >= 8
    _pass(f"Layout properties (non-overlap and exact scale linearity on {checked_plans} plans)")


def test_report_shape(tmp_path, capsys):
    rng = random.Random(7)
    sessions = [
        ResolutionSession(
            fingerprint=ErrorFingerprint(f"E{rng.randint(1, 6):04d}", "m.rs", str(i)),
            first_build=1,
            resolved_build=2,
            arc_seconds=rng.uniform(1, 500),
        )
        for i in range(50)
    ]
    rows = aggregate(sessions)
    assert abs(sum(r.total_share for r in rows) - 1.0) <= 1e-9
    totals = [r.total_share for r in rows]
    assert totals == sorted(totals, reverse=True)

    from borrowviz.telemetry import append_snapshot

    a = ErrorFingerprint("E0382", "m.rs", "a")
    ledger = tmp_path / "ledger.jsonl"
    append_snapshot(ledger, BuildSnapshot(1, 0.0, frozenset({a}), False))
    append_snapshot(ledger, BuildSnapshot(2, 60.0, frozenset(), True))
    assert main(["report", "--ledger", str(ledger), "--format", "csv"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.split(",") == [
        "code", "description", "count", "total_share", "avg_seconds", "stddev_seconds",
    ]
    _pass("Report shape (six columns, shares sum to 1 +/- 1e-9, sorted by total cost)")


def test_cmd_plan_determinism(fixtures_root, capsys):
    outputs = []
    for _ in range(2):
        main(["plan", "--workspace", str(fixtures_root / "e0382"), "main.rs"])
        outputs.append(capsys.readouterr().out.encode())
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0])["plans"]
    _pass("Determinism (cmd_plan byte-identical across two runs)")
