"""Deterministic table emission and the selfcheck report container."""

import json
import os

import numpy as np
import pytest

from relqsl.report import (
    CheckEntry,
    DiscrepancyEntry,
    RunReport,
    emit,
    format_cell,
    plain,
    render_csv,
    render_json,
    write_text,
)


def test_plain_unwraps_numpy_scalars():
    assert plain(np.float64(1.5)) == 1.5
    assert type(plain(np.float64(1.5))) is float
    assert type(plain(np.int32(7))) is int
    # np.bool_ must come out as bool, not as an int
    assert plain(np.bool_(True)) is True
    assert plain("text") == "text"


def test_format_cell_round_trips_floats():
    assert format_cell(0.1) == "0.1"
    assert format_cell(1.4350444756099092) == "1.4350444756099092"
    assert float(format_cell(2.0 / 3.0)) == 2.0 / 3.0
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell(3) == "3"
    assert format_cell("plain") == "plain"


def test_render_csv_layout():
    text = render_csv(("a", "b"), [[1.0, True], [0.5, False]])
    assert text == "a,b\n1.0,true\n0.5,false\n"


def test_render_json_handles_numpy_and_rejects_junk():
    text = render_json({"x": np.float64(0.25), "flag": np.bool_(True)})
    assert json.loads(text) == {"x": 0.25, "flag": True}
    with pytest.raises(TypeError, match="not JSON serializable"):
        render_json({"bad": object()})


def test_write_text_is_atomic(tmp_path):
    target = tmp_path / "out.csv"
    write_text(str(target), "payload\n")
    assert target.read_text(encoding="utf-8") == "payload\n"
    leftovers = [name for name in os.listdir(tmp_path) if name.startswith(".partial-")]
    assert leftovers == []


def test_write_text_stdout(capsys):
    write_text(None, "to console\n")
    assert capsys.readouterr().out == "to console\n"


def test_emit_both_formats(tmp_path):
    header = ("n", "value")
    rows = [[0, 0.5], [1, np.float64(1.5)]]
    csv_path = tmp_path / "table.csv"
    emit(str(csv_path), "csv", header, rows)
    assert csv_path.read_text(encoding="utf-8") == "n,value\n0,0.5\n1,1.5\n"
    json_path = tmp_path / "table.json"
    emit(str(json_path), "json", header, rows)
    assert json.loads(json_path.read_text(encoding="utf-8")) == [
        {"n": 0, "value": 0.5},
        {"n": 1, "value": 1.5},
    ]


def _sample_report(ok: bool) -> RunReport:
    return RunReport(
        version="0.1.0",
        seed=42,
        config={"spectrum": {"nmax": 10}},
        checks=[
            CheckEntry(name="alpha", passed=True, measured={"residual": 1e-12}),
            CheckEntry(
                name="beta", passed=ok, measured={"z": 2.5},
                detail="within three sigma", monte_carlo=True,
            ),
        ],
        discrepancies=[
            DiscrepancyEntry(
                name="spacing", detail="closed form vs quoted rule",
                values={"lhs": 0.999625, "rhs": 0.988},
            )
        ],
    )


def test_report_passed_and_duplicate_guard():
    assert _sample_report(True).passed
    assert not _sample_report(False).passed
    with pytest.raises(ValueError, match="duplicate"):
        RunReport(
            version="0.1.0", seed=0, config={},
            checks=[
                CheckEntry(name="same", passed=True, measured={}),
                CheckEntry(name="same", passed=True, measured={}),
            ],
        )


def test_report_text_rendering():
    text = _sample_report(False).render_text()
    assert "alpha" in text and "pass" in text
    assert "beta" in text and "FAIL" in text
    assert "within three sigma" in text
    assert "spacing" in text
    assert "lhs = 0.999625" in text
    assert text.rstrip().endswith("overall: FAIL")
    ok_text = _sample_report(True).render_text()
    assert ok_text.rstrip().endswith("overall: pass")


def test_report_json_object():
    obj = _sample_report(True).to_json_obj()
    assert obj["passed"] is True
    assert obj["seed"] == 42
    assert obj["checks"][1]["monte_carlo"] is True
    assert obj["discrepancies"][0]["values"]["rhs"] == 0.988
    # numpy payloads must not leak into the JSON object
    report = RunReport(
        version="0.1.0", seed=1, config={},
        checks=[CheckEntry(name="np", passed=True, measured={"v": np.float64(2.0)})],
    )
    encoded = json.dumps(report.to_json_obj())
    assert '"v": 2.0' in encoded
