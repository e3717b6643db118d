import io
import json

import pytest

from tensorbridge.conformance.report import (
    ERROR,
    FAIL,
    PASS,
    CaseRecord,
    emit_report,
    read_report,
    render_report,
    summarize,
)
from tensorbridge.core.errors import ReportIOError

RECORDS = [
    CaseRecord("00000000000000bb", "sum", "plain", "tape", 1.1e-16, 1e-12, PASS),
    CaseRecord("00000000000000aa", "div", "plain", "tape", None, 1e-12, FAIL, "ShapeMismatch vs ok"),
    CaseRecord("00000000000000aa", "div", "imperative", "plain", 0.0, 1e-12, PASS),
    CaseRecord("00000000000000cc", "exp", "plain", "tape", None, 1e-12, ERROR, "ZeroDivisionError"),
]


def test_record_to_dict():
    assert RECORDS[0].to_dict() == {
        "case": "00000000000000bb",
        "op": "sum",
        "a": "plain",
        "b": "tape",
        "max_abs_err": 1.1e-16,
        "tol": 1e-12,
        "status": "pass",
    }
    assert RECORDS[1].to_dict()["error"] == "ShapeMismatch vs ok"


def test_summary():
    summary = summarize(RECORDS, seed=42)
    assert (summary.passed, summary.failed, summary.errored) == (2, 1, 1)
    assert not summary.ok
    assert summarize(RECORDS[:1], seed=0).ok


def test_render_report_order_and_summary():
    lines = render_report(RECORDS, seed=42).splitlines()
    objs = [json.loads(line) for line in lines]
    assert [(o["case"], o["a"]) for o in objs[:-1]] == [
        ("00000000000000aa", "imperative"),
        ("00000000000000aa", "plain"),
        ("00000000000000bb", "plain"),
        ("00000000000000cc", "plain"),
    ]
    assert objs[-1] == {"summary": True, "passed": 2, "failed": 1, "errored": 1, "seed": 42}
    assert objs[1]["max_abs_err"] is None
    assert " " not in lines[0]


def test_render_is_order_independent():
    assert render_report(RECORDS, 1) == render_report(list(reversed(RECORDS)), 1)


def test_invalid_record_rejected():
    bad = CaseRecord("not-hex", "sum", "plain", "tape", 0.0, 1e-12, PASS)
    with pytest.raises(ReportIOError):
        render_report([bad], seed=1)


def test_emit_to_stream():
    stream = io.StringIO()
    summary = emit_report(RECORDS, stream, seed=3)
    assert summary.seed == 3
    assert stream.getvalue().count("\n") == len(RECORDS) + 1


def test_emit_to_stdout(capsys):
    emit_report(RECORDS[:1], "-", seed=42)
    out = capsys.readouterr().out.splitlines()
    assert json.loads(out[-1])["summary"] is True


def test_emit_to_path_and_read_back(tmp_path):
    path = tmp_path / "report.jsonl"
    emit_report(RECORDS, path, seed=42)
    objs = read_report(path)
    assert len(objs) == len(RECORDS) + 1
    assert objs[-1]["seed"] == 42


def test_emit_to_unwritable_path(tmp_path):
    with pytest.raises(ReportIOError):
        emit_report(RECORDS, tmp_path / "missing" / "report.jsonl", seed=1)


def test_read_report_rejects_invalid_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"case":"00000000000000aa","op":"sum"}\n', encoding="utf-8")
    with pytest.raises(ReportIOError):
        read_report(path)
