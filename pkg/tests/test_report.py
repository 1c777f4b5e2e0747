from __future__ import annotations

import json

from rmk.report import EXIT_INPUT, EXIT_OK, EXIT_OVERFLOW, EXIT_VERDICT, HEADER, RunReport, strip_timing


def test_first_failed_verdict_sets_exit_code():
    rep = RunReport("check")
    rep.add("a", True)
    assert rep.exit_code == EXIT_OK
    rep.add("b", False, "why")
    rep.add("c", True)
    assert rep.exit_code == EXIT_VERDICT
    assert rep.status == "fail"


def test_input_error_overrides_verdicts():
    rep = RunReport("check")
    rep.add("a", False)
    rep.fail(EXIT_INPUT, "missing")
    assert rep.exit_code == EXIT_INPUT and rep.status == "input-error"
    rep.fail(EXIT_OVERFLOW, "big")
    assert rep.status == "overflow"


def test_text_layout():
    rep = RunReport("props", seed=4, bounds={"size": 3})
    rep.inputs.append("x.model")
    rep.fact("k", 2)
    rep.add("law", True, "10/10")
    rep.counterexamples.append("none really")
    rep.caveat("c1")
    rep.caveat("c1")
    rep.timing = 1.23456
    lines = rep.render_text().splitlines()
    assert lines == [
        HEADER,
        "command: props",
        "input: x.model",
        "seed: 4",
        "bounds: size=3",
        "k: 2",
        "verdict: PASS law | 10/10",
        "counterexample: none really",
        "caveat: c1",
        "status: ok (exit 0)",
        "timing: 1.235s",
    ]


def test_timing_is_the_only_difference_after_stripping():
    a, b = RunReport("lang"), RunReport("lang")
    a.timing, b.timing = 0.5, 9.0
    for fmt in ("text", "json-like"):
        assert a.render(fmt) != b.render(fmt)
        assert strip_timing(a.render(fmt)) == strip_timing(b.render(fmt))


def test_json_like_round_trips_through_json():
    rep = RunReport("check")
    rep.add("a", False, "d")
    data = json.loads(rep.render("json-like"))
    assert data["verdicts"] == [{"name": "a", "passed": False, "detail": "d"}]
    assert data["status"] == "fail" and data["exit_code"] == EXIT_VERDICT
