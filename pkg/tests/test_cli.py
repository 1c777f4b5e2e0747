from __future__ import annotations

import json
import subprocess
import sys

import pytest

from rmk.cli import main, parse_bounds, run
from rmk.files import DATA, parse_fincat
from rmk.report import HEADER, strip_timing


def invoke(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def lines_with(out, prefix):
    return [l for l in out.splitlines() if l.startswith(prefix)]


# -- check-sig ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["dtt", "cubical"])
def test_corpus_signature_is_accepted(capsys, name):
    code, out = invoke(capsys, "check-sig", f"corpus/{name}.lfsig")
    assert code == 0
    assert out.startswith(HEADER)
    assert "verdict: PASS signature accepted" in out


def test_mutant_is_rejected_with_rule(capsys):
    code, out = invoke(capsys, "check-sig", "corpus/mutants/dtt_swapped_sort.lfsig")
    assert code == 1
    assert lines_with(out, "rule: ")[0] != "rule: ?"
    assert lines_with(out, "failing entry: ")
    assert "status: fail (exit 1)" in out


def test_missing_file_is_an_input_error(capsys):
    code, out = invoke(capsys, "check-sig", "/nonexistent/sig.lfsig")
    assert code == 2
    assert "error: file not found" in out


def test_syntax_error_is_an_input_error(capsys, tmp_path):
    p = tmp_path / "bad.lfsig"
    p.write_text("Type : () => Box\nel : (A : Type => Rep\n", encoding="utf-8")
    code, out = invoke(capsys, "check-sig", str(p))
    assert code == 2
    assert "syntax error at 2:" in out


# -- check ----------------------------------------------------------------------------------

def test_check_accepts_bundled_files(capsys):
    code, out = invoke(capsys, "check", "bases/arrow.fincat", "theories/t1.rmcat", "subsingleton.model", "corpus/pi.lfsig")
    assert code == 0
    assert len(lines_with(out, "verdict: PASS")) == 4


def test_check_reports_invalid_category(capsys, tmp_path):
    text = (DATA / "bases" / "arrow.fincat").read_text(encoding="utf-8")
    p = tmp_path / "broken.fincat"
    p.write_text(text + "arrow g : 0 -> 7\n", encoding="utf-8")
    code, out = invoke(capsys, "check", str(p))
    assert code in (1, 2)
    assert "status: ok" not in out


def test_check_rejects_unknown_kinds(capsys, tmp_path):
    p = tmp_path / "notes.txt"
    p.write_text("hello\n", encoding="utf-8")
    code, out = invoke(capsys, "check", str(p))
    assert code == 2
    assert "unknown file kind" in out


# -- syncat -----------------------------------------------------------------------------------

def test_syncat_reports_contexts_and_homs(capsys, tmp_path):
    dump = tmp_path / "dtt.fincat"
    code, out = invoke(capsys, "syncat", "corpus/dtt.lfsig", "--depth", "2", "--size", "4", "--dump", str(dump), "--model", "subsingleton.model")
    assert code == 0
    assert "contexts: 6" in out
    assert "hom classes: 36" in out
    assert "hom 2 -> 2: 4 [(v1, v1); (v1, v2); (v2, v1); (v2, v2)]" in out
    assert "generator: context 3 -> context 1" in out
    assert "verdict: PASS functorial interpretation in subsingleton" in out
    C = parse_fincat(dump.read_text(encoding="utf-8")).validate()
    assert len(C.objects) == 6


def test_syncat_overflow_has_its_own_exit_code(capsys):
    code, out = invoke(capsys, "syncat", "corpus/dtt.lfsig", "--bounds", "max_count=5")
    assert code == 3
    assert "caveat: partial: enumeration stopped at max_count" in out
    assert lines_with(out, "contexts: ")


# -- lang -------------------------------------------------------------------------------------

def test_lang_of_subsingleton(capsys):
    code, out = invoke(capsys, "lang", "examples/subsingleton.model")
    assert code == 0
    assert "Θ(Type): {A0, A1}" in out
    assert "|Θ(el)|: 1" in out
    assert "verdict: PASS democratic | 2/2 contextual" in out


def test_lang_json_like_is_json(capsys):
    code, out = invoke(capsys, "lang", "subsingleton.model", "--format", "json-like")
    data = json.loads(out)
    assert code == 0 and data["exit_code"] == 0
    assert data["format"] == HEADER
    assert ["|Θ(Type)|", "2"] in data["facts"]


def test_non_democratic_model_is_a_verdict_failure(capsys):
    code, out = invoke(capsys, "lang", "subsingleton_extra.model")
    assert code == 1
    assert "verdict: FAIL democratic" in out


# -- props ------------------------------------------------------------------------------------

def test_props_reports_agreement(capsys):
    code, out = invoke(capsys, "props", "--suite", "bc-pullback", "--seed", "7", "--size", "3", "--cases", "200")
    assert code == 0
    assert "verdict: PASS bc-pullback 200/200 agree" in out


def test_props_is_deterministic(capsys):
    _, a = invoke(capsys, "props", "--suite", "all", "--seed", "3", "--cases", "5")
    _, b = invoke(capsys, "props", "--suite", "all", "--seed", "3", "--cases", "5")
    assert strip_timing(a) == strip_timing(b)
    assert len(lines_with(a, "verdict: ")) == 7


def test_props_writes_figures(capsys, tmp_path):
    code, out = invoke(capsys, "props", "--suite", "dfib-laws", "--cases", "5", "--plot", str(tmp_path))
    assert code == 0
    figs = [l.split(": ", 1)[1] for l in lines_with(out, "figure: ")]
    assert len(figs) == 1
    with open(figs[0], "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_syncat_and_lang_write_figures(tmp_path):
    a = run(["syncat", "corpus/dtt.lfsig", "--plot", str(tmp_path)])
    b = run(["lang", "subsingleton.model", "--plot", str(tmp_path)])
    assert a.figures and b.figures
    assert all(p.endswith(".png") for p in a.figures + b.figures)


def test_bad_bounds_are_input_errors(capsys):
    code, out = invoke(capsys, "props", "--suite", "dfib-laws", "--cases", "3", "--bounds", "fiber=x")
    assert code == 2
    with pytest.raises(ValueError):
        parse_bounds("depth")
    with pytest.raises(ValueError):
        parse_bounds("size=0")
    assert parse_bounds("depth=2, size=4") == {"depth": 2, "size": 4}


def test_console_script_exit_code():
    r = subprocess.run([sys.executable, "-m", "rmk.cli", "check-sig", "corpus/mutants/pi_beta_rhs.lfsig"], capture_output=True, text=True)
    assert r.returncode == 1
    assert r.stdout.startswith(HEADER)
