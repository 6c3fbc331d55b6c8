import json

import pytest

from borrowviz import Diagnostic, filter_supported, parse_diagnostic_stream, run_build
from borrowviz.errors import MalformedRecord, WorkspaceNotFound


def test_empty_stream():
    assert parse_diagnostic_stream("") == []


def test_non_diagnostic_records_skipped():
    stream = "\n".join(
        [
            json.dumps({"reason": "compiler-artifact", "target": {}}),
            "warning: plain text line",
            json.dumps({"reason": "build-finished", "success": True}),
        ]
    )
    assert parse_diagnostic_stream(stream) == []


def test_malformed_diagnostic_raises_with_line_number():
    stream = "\n".join(
        [
            json.dumps({"reason": "build-finished", "success": False}),
            json.dumps({"$message_type": "diagnostic", "level": "error"}),
        ]
    )
    with pytest.raises(MalformedRecord) as exc:
        parse_diagnostic_stream(stream)
    assert exc.value.line_number == 2


def test_cargo_wrapped_diagnostic_unwrapped():
    inner = {
        "message": "mismatched types",
        "code": {"code": "E0308"},
        "level": "error",
        "spans": [
            {
                "file_name": "src/main.rs",
                "line_start": 2,
                "line_end": 2,
                "column_start": 18,
                "column_end": 32,
                "is_primary": True,
                "label": "expected `i32`",
            }
        ],
        "children": [],
        "rendered": "error[E0308]: mismatched types",
    }
    stream = json.dumps({"reason": "compiler-message", "message": inner})
    (diag,) = parse_diagnostic_stream(stream)
    assert diag.code == "E0308"
    assert diag.severity == "error"
    assert diag.primary_span().start.line == 2


def test_captured_use_after_move_stream(fixtures_root):
    # Stream captured live from the use-after-move fixture.
    import subprocess

    proc = subprocess.run(
        ["rustc", "--edition", "2021", "--error-format=json", "--emit=metadata",
         "--out-dir", "/tmp/borrowviz-capture", "main.rs"],
        cwd=fixtures_root / "e0382",
        capture_output=True,
        text=True,
    )
    diags = parse_diagnostic_stream(proc.stderr)
    errors = [d for d in diags if d.severity == "error" and d.code is not None]
    assert [d.code for d in errors] == ["E0382"]
    assert errors[0].primary_span().start.line == 15


def test_syntax_error_has_no_code(build):
    report = build("syntax")
    coded = [d.code for d in report.errors() if d.spans]
    assert coded == [None]


def test_run_build_clean(build):
    report = build("clean")
    assert report.success
    assert not report.errors()


def test_run_build_cargo_workspace(build):
    report = build("cargo_clean")
    assert report.success
    assert not report.errors()


def test_run_build_use_after_move(build):
    report = build("e0382")
    assert not report.success
    assert "E0382" in [d.code for d in report.errors()]


def test_run_build_missing_workspace(fixtures_root):
    with pytest.raises(WorkspaceNotFound):
        run_build(fixtures_root / "does-not-exist")


def test_filter_supported():
    def diag(code):
        return Diagnostic(code=code, severity="error", message="m")

    assert filter_supported([], {"E0382"}) == []
    d1, d2 = diag("E0382"), diag("E0308")
    assert filter_supported([d1, d2], {"E0382", "E0597"}) == [d1]
    # subset and idempotent
    once = filter_supported([d1, d2], {"E0382"})
    assert filter_supported(once, {"E0382"}) == once


def test_filter_supported_on_fixture_stream(build):
    report = build("mixed")
    kept = filter_supported(list(report.errors()), {"E0382", "E0597"})
    assert [d.code for d in kept] == ["E0382"]


def test_diagnostic_roundtrip(build):
    for d in build("e0382").diagnostics:
        assert Diagnostic.from_dict(json.loads(json.dumps(d.to_dict()))) == d


def test_manifest_pairs_are_reproducible(build, manifest):
    # Deterministic (code, primary line) pairs under the pinned toolchain.
    for name, expected in manifest["fixtures"].items():
        report = build(name)
        pairs = []
        for d in report.errors():
            span = d.primary_span()
            if d.code is None and span is None:
                continue
            pairs.append([d.code, span.start.line if span else None])
        assert report.success == expected["success"], name
        assert pairs == expected["errors"], name
