import json
import subprocess
import sys

import pytest

from exacthearts.cli import GOLDEN, golden_results, main, run_query, validate_report
from exacthearts.linalg import Field, InputError
from exacthearts.workspace import WorkspaceError, parse, parse_matrix, parse_text, shipped_workspace

A2_WS = str(shipped_workspace("a2_example"))
DUAL_WS = str(shipped_workspace("dual_numbers"))

MINIMAL = """\
[field]
fp:5
[quiver]
vertices 1
[modules]
S = simple 1
"""


def _bad(extra_maps: str) -> str:
    return f"""\
[field]
fp:5
[quiver]
vertices 1 2
arrow a : 2 -> 1
[modules]
P2 = projective 2
[maps]
{extra_maps}
"""


def test_shipped_workspaces_parse():
    ws = parse(A2_WS)
    assert set(ws.modules) >= {"P1", "P2", "I2", "S1"}
    assert ws.subcategory("E_sub").multiplicity_bound == 2
    assert len(ws.queries) == 4
    d = parse(DUAL_WS)
    assert d.algebra.dim == 2


def test_canonical_round_trip():
    for path in (A2_WS, DUAL_WS):
        ws = parse(path)
        text = ws.canonical()
        assert parse_text(text).canonical() == text


def test_field_override_changes_the_field():
    ws = parse(A2_WS, Field(7))
    assert ws.algebra.field == Field(7)


def test_intertwining_error_names_the_arrow(tmp_path):
    p = tmp_path / "bad.ws"
    p.write_text(_bad("f : P2 -> P2 | 1 = [1]\n  2 = [2]".replace("\n  ", " | ")))
    with pytest.raises(WorkspaceError, match=r"bad\.ws:\d+:\d+: .*arrow a"):
        parse(p)


def test_unknown_names_are_errors():
    with pytest.raises(WorkspaceError, match="Q"):
        parse_text(_bad("f : P2 -> Q zero"), "x.ws")


def test_duplicate_names_are_errors():
    with pytest.raises(WorkspaceError):
        parse_text(MINIMAL + "S = simple 1\n", "x.ws")


def test_matrix_parsing():
    f = Field(5)
    assert parse_matrix("[1 2; 3 4]", f, 2, 2).data == ((1, 2), (3, 4))
    assert parse_matrix("[]", f, 0, 3).shape == (0, 3)
    with pytest.raises(InputError):
        parse_matrix("[1 2]", f, 2, 2)


def test_golden_examples_all_pass():
    pairs = golden_results()
    assert [n for n, _ in pairs] == [g[0] for g in GOLDEN]
    for name, r in pairs:
        assert r.status == "ok", (name, r.headline, r.expect)


def test_run_query_reports_failed_expectation():
    ws = parse(A2_WS)
    r = run_query(ws, "heart compute E_sub RHb expect P2")
    assert r.status == "fail" and r.headline == "P1, P2, I2"


def test_run_query_turns_errors_into_results():
    r = run_query(parse(A2_WS), "heart compute Nope LHb")
    assert r.status == "error"


def test_main_text_output(capsys):
    assert main(["heart", "compute", A2_WS, "E_sub", "LHb"]) == 0
    out = capsys.readouterr().out
    assert "P2, I2, shift(P1,1)" in out


def test_main_json_schema(capsys):
    code = main(["run", A2_WS, "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["exit_code"] == code
    assert len(doc["results"]) == 4
    for entry in doc["results"]:
        assert validate_report(entry) == []


def test_validate_report_flags_problems():
    assert validate_report({"query": "x"})
    assert validate_report({"query": "x", "status": "maybe", "headline": "", "expect": None, "report": {}})


def test_json_is_identical_across_jobs(capsys):
    main(["run", A2_WS, "--format", "json", "--jobs", "1"])
    one = capsys.readouterr().out
    main(["run", A2_WS, "--format", "json", "--jobs", "4"])
    four = capsys.readouterr().out
    assert one == four


def test_negative_window_value(capsys):
    assert main(["heart", "compute", A2_WS, "E_sub", "LHb", "--window", "-2:2"]) == 0
    capsys.readouterr()


def test_exit_codes(tmp_path, capsys):
    assert main(["maxneg", DUAL_WS]) == 0
    bad = tmp_path / "bad.ws"
    bad.write_text(_bad("f : P2 -> P2 | 1 = [1] | 2 = [2]"))
    assert main(["check", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "arrow a" in err
    ws = tmp_path / "fail.ws"
    ws.write_text(open(A2_WS).read().replace("heart compute E_sub RHb", "heart compute E_sub RHb expect nothing"))
    assert main(["run", str(ws)]) == 1


def test_unknown_gives_exit_two(capsys):
    # one resolution step cannot decide bounded membership for coker Y(tm)
    assert main(["functor", DUAL_WS, "E_split", "tm", "--completion", "Rb", "--depth", "1"]) == 2
    assert "Rb: unknown" in capsys.readouterr().out


def test_minimal_workspace_check(tmp_path, capsys):
    p = tmp_path / "min.ws"
    p.write_text(MINIMAL)
    assert main(["check", str(p)]) == 0
    assert "1 modules" in capsys.readouterr().out


def test_paper_examples_subcommand(capsys):
    assert main(["paper-examples", "--only", "dual-maxneg"]) == 0
    assert "VerifiedUpToBound(2)" in capsys.readouterr().out
    assert main(["paper-examples", "--only", "no-such"]) == 1


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "exacthearts.cli", "maxneg", DUAL_WS, "--format", "json"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"][0]["headline"] == "VerifiedUpToBound(2)"
